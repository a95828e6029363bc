// chstokes: velocity fields, measurements, and skew-form advection.
#include "chstokes/field.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chst {

VelocityField make_zero_field(const Grid& g) {
  VelocityField f;
  f.u1 = g.make_centers();
  f.u2 = g.make_nodes();
  f.top_shear = BoundaryField(g.nx());
  f.time = 0.0;
  f.solenoidal = true;
  return f;
}

VelocityField field_lincomb(double a, const VelocityField& x, double b,
                            const VelocityField& y) {
  VelocityField r;
  r.u1 = lincomb(cplx(a, 0.0), x.u1, cplx(b, 0.0), y.u1);
  r.u2 = lincomb(cplx(a, 0.0), x.u2, cplx(b, 0.0), y.u2);
  r.top_shear = lincomb(cplx(a, 0.0), x.top_shear, cplx(b, 0.0), y.top_shear);
  r.time = x.time;
  r.solenoidal = x.solenoidal && y.solenoidal;
  return r;
}

void field_scale(VelocityField& f, double alpha) {
  scale(f.u1, alpha);
  scale(f.u2, alpha);
  for (auto& c : f.top_shear.coef) c *= alpha;
}

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

double inner_l2(const Grid& g, const VelocityField& f, const VelocityField& h) {
  return ip_centers(g, f.u1, h.u1) + ip_nodes(g, f.u2, h.u2);
}

double norm_l2_sq(const Grid& g, const VelocityField& f) {
  return inner_l2(g, f, f);
}

double norm_l2(const Grid& g, const VelocityField& f) {
  return std::sqrt(std::max(0.0, norm_l2_sq(g, f)));
}

double grad_sq(const Grid& g, const VelocityField& f) {
  const SpectralArray du1dx = ddx(g, f.u1);
  const SpectralArray du1dz = ddz_center_to_node(g, f.u1, f.closure());
  const SpectralArray du2dx = ddx(g, f.u2);
  const SpectralArray du2dz = ddz_node_to_center(g, f.u2);
  return ip_centers(g, du1dx, du1dx) + ip_nodes(g, du1dz, du1dz) +
         ip_nodes(g, du2dx, du2dx) + ip_centers(g, du2dz, du2dz);
}

double norm_h1(const Grid& g, const VelocityField& f) {
  return std::sqrt(std::max(0.0, norm_l2_sq(g, f) + grad_sq(g, f)));
}

double norm_l4(const Grid& g, const VelocityField& f) {
  SpectralArray p1 = f.u1;
  SpectralArray p2 = avg_node_to_center(g, f.u2);
  g.to_physical(p1);
  g.to_physical(p2);
  const double wgt = 2.0 * Grid::kPi / g.nx() * g.dz();
  double s = 0.0;
  for (size_t i = 0; i < p1.data.size(); ++i) {
    const double q = p1.data[i].real() * p1.data[i].real() +
                     p2.data[i].real() * p2.data[i].real();
    s += q * q;
  }
  return std::pow(wgt * s, 0.25);
}

double max_pointwise(const Grid& g, const VelocityField& f) {
  SpectralArray p1 = f.u1;
  SpectralArray p2 = avg_node_to_center(g, f.u2);
  g.to_physical(p1);
  g.to_physical(p2);
  double worst = 0.0;
  for (size_t i = 0; i < p1.data.size(); ++i) {
    const double q = std::hypot(p1.data[i].real(), p2.data[i].real());
    if (!(q <= 1e300)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, q);
  }
  return worst;
}

SpectralArray divergence(const Grid& g, const VelocityField& f) {
  SpectralArray d = ddx(g, f.u1);
  const SpectralArray dz = ddz_node_to_center(g, f.u2);
  for (size_t i = 0; i < d.data.size(); ++i) d.data[i] += dz.data[i];
  return d;
}

double divergence_max(const Grid& g, const VelocityField& f) {
  const SpectralArray d = divergence(g, f);
  double worst = 0.0;
  for (const auto& c : d.data) worst = std::max(worst, std::abs(c));
  return worst;
}

SpectralArray vorticity(const Grid& g, const VelocityField& f) {
  SpectralArray w = ddx(g, f.u2);
  const SpectralArray du1dz = ddz_center_to_node(g, f.u1, f.closure());
  for (size_t i = 0; i < w.data.size(); ++i) w.data[i] -= du1dz.data[i];
  return w;
}

// ---------------------------------------------------------------------------
// Advection
// ---------------------------------------------------------------------------

AdvectionTerm advect(const Grid& g, const VelocityField& u,
                     const VelocityField& v) {
  const CenterClosure bc_u = u.closure();
  const CenterClosure bc_v = v.closure();

  const SpectralArray& m1c = u.u1;                            // centers
  const SpectralArray m1n = avg_center_to_node(g, u.u1, bc_u);  // nodes
  const SpectralArray& m2n = u.u2;                            // nodes

  // Convective form u.grad(v), vertical products collocated at nodes.
  SpectralArray conv1 = dealiased_product(g, m1c, ddx(g, v.u1));
  {
    const SpectralArray q =
        dealiased_product(g, m2n, ddz_center_to_node(g, v.u1, bc_v));
    const SpectralArray qc = avg_node_to_center(g, q);
    for (size_t i = 0; i < conv1.data.size(); ++i) conv1.data[i] += qc.data[i];
  }
  SpectralArray conv2 = dealiased_product(g, m1n, ddx(g, v.u2));
  {
    const SpectralArray q =
        dealiased_product(g, m2n, ddz_centered_nodes(g, v.u2));
    for (size_t i = 0; i < conv2.data.size(); ++i) conv2.data[i] += q.data[i];
  }

  // Divergence form div(v x u) with identical factor placement.
  SpectralArray div1 = ddx(g, dealiased_product(g, v.u1, m1c));
  {
    const SpectralArray q =
        dealiased_product(g, avg_center_to_node(g, v.u1, bc_v), m2n);
    const SpectralArray qc = ddz_node_to_center(g, q);
    for (size_t i = 0; i < div1.data.size(); ++i) div1.data[i] += qc.data[i];
  }
  SpectralArray div2 = ddx(g, dealiased_product(g, v.u2, m1n));
  {
    const SpectralArray q =
        ddz_centered_nodes(g, dealiased_product(g, v.u2, m2n));
    for (size_t i = 0; i < div2.data.size(); ++i) div2.data[i] += q.data[i];
  }

  AdvectionTerm t;
  t.c1 = lincomb(cplx(0.5, 0.0), conv1, cplx(0.5, 0.0), div1);
  t.c2 = lincomb(cplx(0.5, 0.0), conv2, cplx(0.5, 0.0), div2);
  // The vertical momentum tendency is only meaningful at interior nodes;
  // u2 is pinned to zero on both walls.
  for (int k = 0; k < g.nx(); ++k) {
    t.c2.at(k, 0) = cplx(0.0, 0.0);
    t.c2.at(k, g.nz()) = cplx(0.0, 0.0);
  }
  return t;
}

double pair_advection(const Grid& g, const AdvectionTerm& t,
                      const VelocityField& w) {
  return ip_centers(g, t.c1, w.u1) + ip_nodes(g, t.c2, w.u2);
}

double trilinear_form(const Grid& g, const VelocityField& u,
                      const VelocityField& v, const VelocityField& w) {
  return pair_advection(g, advect(g, u, v), w);
}

// ---------------------------------------------------------------------------
// Analytic samplers
// ---------------------------------------------------------------------------

VelocityField streamfunction_mode_field(const Grid& g, int k, int m,
                                        double amplitude) {
  CHST_REQUIRE(k >= 1 && k <= g.dealias_cutoff(),
               "stream mode k out of the dealiased range");
  CHST_REQUIRE(m >= 1, "stream mode m must be >= 1");
  VelocityField f = make_zero_field(g);
  const double a = g.a();
  const double mz = 2.0 * Grid::kPi * m / a;  // vertical wavenumber
  const int kp = k;                           // +k index
  const int km = g.nx() - k;                  // -k index
  // u1 = amplitude * cos(kx) * (pi m / a) * sin(mz z)
  for (int j = 0; j < g.nz(); ++j) {
    const double z = g.z_center(j);
    const double val = amplitude * (Grid::kPi * m / a) * std::sin(mz * z);
    f.u1.at(kp, j) = cplx(0.5 * val, 0.0);
    f.u1.at(km, j) = cplx(0.5 * val, 0.0);
  }
  // u2 = amplitude * k * sin(kx) * (1 - cos(mz z)) / 2
  for (int j = 0; j <= g.nz(); ++j) {
    const double z = g.z_node(j);
    const double val = amplitude * k * 0.5 * (1.0 - std::cos(mz * z));
    f.u2.at(kp, j) = cplx(0.0, -0.5 * val);
    f.u2.at(km, j) = cplx(0.0, 0.5 * val);
  }
  // d(u1)/dz at z=a: amplitude * cos(kx) * (pi m / a) * mz * cos(mz a) and
  // cos(mz a) = 1.
  const double shear = amplitude * (Grid::kPi * m / a) * mz;
  f.top_shear.coef[kp] = cplx(0.5 * shear, 0.0);
  f.top_shear.coef[km] = cplx(0.5 * shear, 0.0);
  f.solenoidal = false;  // holds in the continuum; project for discrete use
  return f;
}

}  // namespace chst
