// chstokes: marching the boundary-driven Stokes layer, and the exact
// covariance recursion used as its statistics oracle.
#include "chstokes/linear_sde.h"

#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace chst {

VelocityField step_stochastic_stokes(const Grid& g, const VelocityField& w,
                                     const BoundaryField& impulse, double dt,
                                     const StokesResolvent& resolvent) {
  CHST_REQUIRE(std::abs(resolvent.lambda() * dt - 1.0) < 1e-12,
               "resolvent shift does not match 1/dt");
  VelocityField f = w;
  field_scale(f, 1.0 / dt);
  BoundaryField datum(g.nx());
  for (int k = 0; k < g.nx(); ++k) datum.coef[k] = impulse.coef[k] / dt;
  StokesSolution s = resolvent.solve(f, datum);
  s.u.time = w.time + dt;
  return std::move(s.u);
}

double WPathStats::l4l4() const {
  return std::pow(std::max(0.0, l4l4_accum), 0.25);
}

WPath simulate_w(const Grid& g, const BoundaryNoiseModel& m, double nu,
                 double dt, int n_steps, uint64_t path, const WPathOptions& opt,
                 const std::function<void(const VelocityField&, int)>& on_step) {
  CHST_REQUIRE(n_steps >= 1, "need at least one step");
  m.validate(g.nx());
  m.micro_per_step(dt);  // validates divisibility up front

  const StokesResolvent resolvent(g, 1.0 / dt, nu);
  WPath out;
  VelocityField w = make_zero_field(g);

  auto snapshot = [&](const VelocityField& state) {
    out.snapshot_times.push_back(state.time);
    out.snapshots.push_back(state);
  };
  if (opt.snapshot_stride > 0) snapshot(w);

  for (int n = 0; n < n_steps; ++n) {
    if (opt.collect_stats) {
      const double l4 = norm_l4(g, w);
      out.stats.l4l4_accum += dt * l4 * l4 * l4 * l4;
      out.stats.sup_l2 = std::max(out.stats.sup_l2, norm_l2(g, w));
    }
    const double t_n = n * dt;
    const BoundaryField impulse =
        noise_impulse(m, g, dt, path, static_cast<uint64_t>(n), t_n);
    w = step_stochastic_stokes(g, w, impulse, dt, resolvent);
    if (opt.snapshot_stride > 0 && (n + 1) % opt.snapshot_stride == 0)
      snapshot(w);
    if (on_step) on_step(w, n + 1);
  }
  if (opt.collect_stats)
    out.stats.sup_l2 = std::max(out.stats.sup_l2, norm_l2(g, w));
  out.final = std::move(w);
  return out;
}

int center_index_near(const Grid& g, double z_star) {
  int best = 0;
  double best_d = std::abs(g.z_center(0) - z_star);
  for (int j = 1; j < g.nz(); ++j) {
    const double d = std::abs(g.z_center(j) - z_star);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

double ou_mode0_variance(int nz, double a, double nu,
                         const BoundaryNoiseModel& m, double dt, int n_steps,
                         double z_star) {
  CHST_REQUIRE(nz >= 2 && a > 0.0 && nu > 0.0 && dt > 0.0 && n_steps >= 1,
               "bad OU recursion parameters");
  const double dz = a / nz;
  const double idz2 = 1.0 / (dz * dz);
  const int n_micro = m.micro_per_step(dt);
  const double step_var = n_micro * m.dt_micro;  // exact increment variance

  // Symmetric tridiagonal Laplacian with the wall closures of w1
  // (Dirichlet mirror below, Neumann ghost above).
  std::vector<double> diag(nz, -2.0 * idz2);
  std::vector<double> off(nz - 1, idz2);
  diag.front() = -3.0 * idz2;
  diag.back() = -1.0 * idz2;

  std::vector<double> z(static_cast<size_t>(nz) * nz);
  {
    const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', nz,
                                          diag.data(), off.data(), z.data(),
                                          nz);
    CHST_REQUIRE(info == 0, "eigendecomposition failed");
  }
  // diag now holds the eigenvalues; z holds orthonormal eigenvectors
  // (column a at z[i + a*nz]).
  std::vector<double> mu(nz);
  for (int i = 0; i < nz; ++i) mu[i] = 1.0 / (1.0 - dt * nu * diag[i]);

  // Forcing direction: (nu/dz) * e_last, rotated into the eigenbasis.
  std::vector<double> q(nz);
  for (int i = 0; i < nz; ++i)
    q[i] = z[(nz - 1) + static_cast<size_t>(i) * nz] * (nu / dz);

  // Covariance recursion in the eigenbasis:
  //   C' = D (C + s q q^T) D,  s = (sigma0 * schedule(t))^2 * step_var.
  std::vector<double> c(static_cast<size_t>(nz) * nz, 0.0);
  for (int n = 0; n < n_steps; ++n) {
    const double sched = m.schedule.factor_at(n * dt);
    const double s = m.sigma(0) * sched * m.sigma(0) * sched * step_var;
    for (int bcol = 0; bcol < nz; ++bcol)
      for (int arow = 0; arow < nz; ++arow) {
        double& cc = c[arow + static_cast<size_t>(bcol) * nz];
        cc = mu[arow] * mu[bcol] * (cc + s * q[arow] * q[bcol]);
      }
  }

  // Read the physical-space variance at the center nearest z_star.
  int jstar = 0;
  double best = std::abs((0.5) * dz - z_star);
  for (int j = 1; j < nz; ++j) {
    const double d = std::abs((j + 0.5) * dz - z_star);
    if (d < best) {
      best = d;
      jstar = j;
    }
  }
  double var = 0.0;
  for (int bcol = 0; bcol < nz; ++bcol) {
    const double zb = z[jstar + static_cast<size_t>(bcol) * nz];
    for (int arow = 0; arow < nz; ++arow)
      var += z[jstar + static_cast<size_t>(arow) * nz] *
             c[arow + static_cast<size_t>(bcol) * nz] * zb;
  }
  return var;
}

}  // namespace chst
