// Elliptic layer tests: Helmholtz projection, the steady boundary-to-domain
// map, and the implicit Stokes solve.  References: the closed-form stream
// function in analytic_neumann.h (validated below against values frozen from
// tools/gen_oracle_values.py) and a manufactured polynomial Stokes solution.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "analytic_neumann.h"
#include "chstokes/elliptic.h"
#include "chstokes/field.h"

using namespace chst;

namespace {

VelocityField random_admissible(const Grid& g, uint64_t seed,
                                bool with_shear) {
  VelocityField f = make_zero_field(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : f.u1.data) v = cplx(dist(rng), 0.0);
  for (auto& v : f.u2.data) v = cplx(dist(rng), 0.0);
  g.to_spectral(f.u1);
  g.to_spectral(f.u2);
  for (int k = 0; k < g.nx(); ++k) {  // no normal flow through the walls
    f.u2.at(k, 0) = 0.0;
    f.u2.at(k, g.nz()) = 0.0;
  }
  if (with_shear) {
    f.top_shear.coef[0] = 0.3;
    f.top_shear.coef[1] = cplx(0.2, 0.1);
    f.top_shear.coef[g.nx() - 1] = cplx(0.2, -0.1);
  }
  return f;
}

double sup_diff(const SpectralArray& x, const SpectralArray& y) {
  double m = 0.0;
  for (size_t i = 0; i < x.data.size(); ++i)
    m = std::max(m, std::abs(x.data[i] - y.data[i]));
  return m;
}

}  // namespace

TEST_CASE("analytic reference reproduces the frozen high-precision values") {
  // tools/gen_oracle_values.py, k=3, a=1, ghat=1 (mpmath, 50 digits).
  chst_test::AnalyticNeumannMode ref(3, 1.0, 1.0);
  CHECK(ref.dpsi(0.2578125) ==
        doctest::Approx(-0.0305030701394137999).epsilon(1e-12));
  CHECK(ref.dpsi(0.5078125) ==
        doctest::Approx(-0.0305847853793144612).epsilon(1e-12));
  CHECK(ref.dpsi(0.7578125) ==
        doctest::Approx(0.0103688058747744151).epsilon(1e-12));
  CHECK(ref.psi(0.25) ==
        doctest::Approx(-0.00453047959703738758).epsilon(1e-12));
  CHECK(ref.psi(0.5) ==
        doctest::Approx(-0.012725270239145205).epsilon(1e-12));
  CHECK(ref.psi(0.75) ==
        doctest::Approx(-0.016859148739459083).epsilon(1e-12));
  // Boundary conditions of the closed form itself.
  CHECK(std::abs(ref.psi(0.0)) < 1e-15);
  CHECK(std::abs(ref.dpsi(0.0)) < 1e-15);
  CHECK(std::abs(ref.psi(1.0)) < 1e-15);
  CHECK(ref.d2psi(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  // Channel integrals.
  CHECK(ref.l2_sq() == doctest::Approx(0.009865460706467216).epsilon(1e-11));
  CHECK(ref.grad_sq() ==
        doctest::Approx(0.488826017840896077).epsilon(1e-11));
  CHECK(ref.h1() == doctest::Approx(0.70618091063647656).epsilon(1e-11));
}

TEST_CASE("projection output is solenoidal with clean walls") {
  Grid g(32, 32, 1.0);
  HelmholtzProjector proj(g);
  VelocityField f = random_admissible(g, 71, true);
  VelocityField p = proj.project(f);
  CHECK(p.solenoidal);
  CHECK(divergence_max(g, p) < 1e-11);
  for (int k = 0; k < g.nx(); ++k) {
    CHECK(std::abs(p.u2.at(k, 0)) == 0.0);
    CHECK(std::abs(p.u2.at(k, g.nz())) == 0.0);
  }
  CHECK(reality_defect(g, p.u1) < 1e-12);
  CHECK(reality_defect(g, p.u2) < 1e-12);
}

TEST_CASE("projection is idempotent and orthogonal") {
  Grid g(32, 32, 1.0);
  HelmholtzProjector proj(g);
  VelocityField f = random_admissible(g, 72, true);
  VelocityField p = proj.project(f);
  VelocityField pp = proj.project(p);
  CHECK(sup_diff(p.u1, pp.u1) < 1e-12);
  CHECK(sup_diff(p.u2, pp.u2) < 1e-12);
  // The removed part is orthogonal to the retained part in the staggered
  // quadrature inner product.
  VelocityField r = field_lincomb(1.0, f, -1.0, p);
  const double cross = inner_l2(g, r, p);
  CHECK(std::abs(cross) < 1e-11 * norm_l2(g, f) * norm_l2(g, p));
  // Admissible input keeps its shear datum (the potential has zero normal
  // derivative at the top, so the tangential correction vanishes).
  CHECK(std::abs(p.top_shear.coef[1] - f.top_shear.coef[1]) < 1e-13);
}

TEST_CASE("removed part equals the gradient of the reported potential") {
  Grid g(32, 32, 1.0);
  HelmholtzProjector proj(g);
  VelocityField f = random_admissible(g, 73, false);
  VelocityField p = proj.project(f);
  SpectralArray psi = proj.potential(f);
  SpectralArray g1 = ddx(g, psi);
  double err1 = 0.0;
  for (int k = 0; k < g.nx(); ++k)
    for (int j = 0; j < g.nz(); ++j)
      err1 = std::max(err1,
                      std::abs(f.u1.at(k, j) - p.u1.at(k, j) - g1.at(k, j)));
  CHECK(err1 < 1e-12);
  double err2 = 0.0;
  for (int k = 0; k < g.nx(); ++k)
    for (int j = 1; j < g.nz(); ++j) {
      const cplx dpsi = (psi.at(k, j) - psi.at(k, j - 1)) / g.dz();
      err2 = std::max(err2,
                      std::abs(f.u2.at(k, j) - p.u2.at(k, j) - dpsi));
    }
  CHECK(err2 < 1e-12);
}

TEST_CASE("boundary map reproduces a linear profile exactly") {
  // For a constant datum c the steady problem has the exact solution
  // u = (c z, 0) with zero pressure; the staggered scheme reproduces it to
  // linear-solver round-off at any resolution.
  Grid g(16, 48, 1.0);
  BoundaryField datum(g.nx());
  datum.coef[0] = 0.35;
  VelocityField u = neumann_map(g, datum, 0.8);
  double err = 0.0;
  for (int j = 0; j < g.nz(); ++j)
    err = std::max(err,
                   std::abs(u.u1.at(0, j) - cplx(0.35 * g.z_center(j), 0.0)));
  CHECK(err < 1e-12);
  for (int k = 1; k < g.nx(); ++k)
    for (int j = 0; j < g.nz(); ++j) CHECK(std::abs(u.u1.at(k, j)) < 1e-13);
  CHECK(divergence_max(g, u) < 1e-12);
  CHECK(u.top_shear.coef[0] == cplx(0.35, 0.0));
}

TEST_CASE("boundary map matches the closed form at mode k=3") {
  chst_test::AnalyticNeumannMode ref(3, 1.0, 1.0);
  // Datum g(x) = cos(3x); the solution is nu-independent (nu only scales
  // the pressure), which using nu=0.7 exercises implicitly.
  {
    Grid g(16, 64, 1.0);
    BoundaryField datum(g.nx());
    datum.coef[3] = 0.5;
    datum.coef[g.nx() - 3] = 0.5;
    VelocityField u = neumann_map(g, datum, 0.7);
    // u1 = psi'(z) cos(3x): the +3 coefficient is psi'/2 at each center.
    for (int j : {16, 32, 48}) {
      const double zc = g.z_center(j);
      CHECK(std::abs(u.u1.at(3, j) - cplx(0.5 * ref.dpsi(zc), 0.0)) < 2e-4);
    }
    // u2 = 3 psi(z) sin(3x): the +3 coefficient is -1.5 i psi at each node.
    for (int j : {16, 32, 48}) {
      const double zn = g.z_node(j);
      CHECK(std::abs(u.u2.at(3, j) - cplx(0.0, -1.5 * ref.psi(zn))) < 2e-4);
    }
    // Frozen channel norms of the continuum solution.
    CHECK(norm_l2_sq(g, u) ==
          doctest::Approx(0.009865460706467216).epsilon(1e-2));
    CHECK(grad_sq(g, u) == doctest::Approx(0.488826017840896077).epsilon(1e-2));
    CHECK(norm_h1(g, u) == doctest::Approx(0.70618091063647656).epsilon(1e-2));
  }

  // Second-order convergence of the discrete map, measured at z = 1/2.
  double errs[2];
  int idx = 0;
  for (int nz : {64, 128}) {
    Grid g(16, nz, 1.0);
    BoundaryField datum(g.nx());
    datum.coef[3] = 0.5;
    datum.coef[g.nx() - 3] = 0.5;
    VelocityField u = neumann_map(g, datum, 0.7);
    const int jmid = nz / 2;  // node at z = 1/2
    errs[idx++] =
        std::abs(u.u2.at(3, jmid) - cplx(0.0, -1.5 * ref.psi(0.5)));
  }
  CHECK(errs[1] < 0.35 * errs[0]);
}

TEST_CASE("implicit solve matches a manufactured polynomial solution") {
  // u* = (cos(x) phi(z), sin(x) psi2(z)) with phi = 2z - 6z^2 + 4z^3 and
  // psi2 = z^2 - 2z^3 + z^4 is divergence-free (psi2' = phi), vanishes at
  // z=0, has no normal flow at z=1, and carries shear phi'(1) = 2 there.
  // With p* = cos(x) cos(pi z) the body force lambda u* - nu lap(u*) +
  // grad(p*) is polynomial-trig and sampled exactly.
  const double lambda = 200.0, nu = 0.7;
  auto phi = [](double z) { return 2.0 * z - 6.0 * z * z + 4.0 * z * z * z; };
  auto phi2 = [](double z) { return -12.0 + 24.0 * z; };  // phi''
  auto psi2 = [](double z) {
    return z * z - 2.0 * z * z * z + z * z * z * z;
  };
  auto psi2dd = [](double z) { return 2.0 - 12.0 * z + 12.0 * z * z; };

  double sup_err[2];
  int idx = 0;
  for (int nz : {32, 64}) {
    Grid g(16, nz, 1.0);
    StokesResolvent solver(g, lambda, nu);
    VelocityField f = make_zero_field(g);
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.x_point(i);
      for (int j = 0; j < nz; ++j) {
        const double z = g.z_center(j);
        f.u1.at(i, j) =
            std::cos(x) * (lambda * phi(z) - nu * (phi2(z) - phi(z))) -
            std::sin(x) * std::cos(Grid::kPi * z);
      }
      for (int j = 1; j < nz; ++j) {
        const double z = g.z_node(j);
        f.u2.at(i, j) =
            std::sin(x) * (lambda * psi2(z) - nu * (psi2dd(z) - psi2(z))) -
            Grid::kPi * std::cos(x) * std::sin(Grid::kPi * z);
      }
    }
    g.to_spectral(f.u1);
    g.to_spectral(f.u2);
    BoundaryField datum(g.nx());
    datum.coef[1] = 1.0;  // 2 cos(x) has half-coefficients 1
    datum.coef[g.nx() - 1] = 1.0;
    StokesSolution sol = solver.solve(f, datum);

    double err = 0.0;
    for (int j = 0; j < nz; ++j)
      err = std::max(err, std::abs(sol.u.u1.at(1, j) -
                                   cplx(0.5 * phi(g.z_center(j)), 0.0)));
    for (int j = 0; j <= nz; ++j)
      err = std::max(err, std::abs(sol.u.u2.at(1, j) -
                                   cplx(0.0, -0.5 * psi2(g.z_node(j)))));
    sup_err[idx++] = err;

    CHECK(divergence_max(g, sol.u) < 1e-10 * lambda);
    if (nz == 64) {
      // Pressure of the k=1 mode approximates cos(pi z)/2.
      double perr = 0.0;
      for (int j = 0; j < nz; ++j)
        perr = std::max(
            perr, std::abs(sol.p.at(1, j) -
                           cplx(0.5 * std::cos(Grid::kPi * g.z_center(j)),
                                0.0)));
      CHECK(perr < 8e-3);
    }
  }
  CHECK(sup_err[0] < 2e-3);
  CHECK(sup_err[1] < 0.45 * sup_err[0]);
}

TEST_CASE("implicit solve, horizontal-mean row") {
  // k=0: u1 solves (lambda - nu d_zz) u1 = f1 with the wall closures, u2
  // stays zero, and any mean vertical forcing is absorbed by the pressure.
  const double lambda = 100.0, nu = 0.5;
  auto phi = [](double z) { return 2.0 * z - 6.0 * z * z + 4.0 * z * z * z; };
  auto phi2 = [](double z) { return -12.0 + 24.0 * z; };

  double sup_err[2];
  int idx = 0;
  for (int nz : {32, 64}) {
    Grid g(8, nz, 1.0);
    StokesResolvent solver(g, lambda, nu);
    VelocityField f = make_zero_field(g);
    for (int j = 0; j < nz; ++j)
      f.u1.at(0, j) =
          lambda * phi(g.z_center(j)) - nu * phi2(g.z_center(j));
    for (int j = 1; j < nz; ++j)  // pure-gradient forcing, absorbed by p
      f.u2.at(0, j) = std::sin(Grid::kPi * g.z_node(j));
    BoundaryField datum(g.nx());
    datum.coef[0] = 2.0;  // phi'(1) = 2
    StokesSolution sol = solver.solve(f, datum);
    double err = 0.0;
    for (int j = 0; j < nz; ++j)
      err = std::max(err,
                     std::abs(sol.u.u1.at(0, j) - cplx(phi(g.z_center(j)), 0.0)));
    sup_err[idx++] = err;
    for (int j = 0; j <= nz; ++j) CHECK(std::abs(sol.u.u2.at(0, j)) == 0.0);
    // p' = f2: the mean-zero discrete antiderivative of sin(pi z).
    if (nz == 64) {
      double perr = 0.0;
      for (int j = 0; j < nz; ++j) {
        const double exact = -std::cos(Grid::kPi * g.z_center(j)) / Grid::kPi;
        // mean of -cos(pi z)/pi over (0,1) is 0, matching the pinning
        perr = std::max(perr, std::abs(sol.p.at(0, j) - cplx(exact, 0.0)));
      }
      CHECK(perr < 1e-3);
    }
  }
  CHECK(sup_err[0] < 5e-3);
  CHECK(sup_err[1] < 0.45 * sup_err[0]);
}

TEST_CASE("projected negative laplacian is symmetric positive definite") {
  Grid g(32, 32, 1.0);
  HelmholtzProjector proj(g);
  VelocityField u = proj.project(random_admissible(g, 91, false));
  VelocityField v = proj.project(random_admissible(g, 92, false));
  VelocityField au = stokes_operator_apply(g, proj, u);
  VelocityField av = stokes_operator_apply(g, proj, v);
  const double lhs = inner_l2(g, au, v);
  const double rhs = inner_l2(g, u, av);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
  CHECK(inner_l2(g, au, u) > 0.0);
  CHECK(inner_l2(g, av, v) > 0.0);
}
