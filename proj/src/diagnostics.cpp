// chstokes: interior regularity diagnostics and dependence probes.
#include "chstokes/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace chst {

namespace {

// Node rows j with z_lo <= z_j <= z_hi, clipped so that a five-point
// vertical stencil fits (2 <= j <= nz-2).
std::pair<int, int> window_rows(const Grid& g, double z_lo, double z_hi) {
  int lo = 2, hi = g.nz() - 2;
  while (lo <= hi && g.z_node(lo) < z_lo) ++lo;
  while (hi >= lo && g.z_node(hi) > z_hi) --hi;
  CHST_REQUIRE(lo <= hi, "empty interior window");
  return {lo, hi};
}

// Window L2 norm of a nodes array over rows [lo, hi].
double window_norm(const Grid& g, const SpectralArray& f, int lo, int hi) {
  double s = 0.0;
  for (int k = 0; k < g.nx(); ++k)
    for (int j = lo; j <= hi; ++j) s += std::norm(f.at(k, j));
  return std::sqrt(2.0 * Grid::kPi * g.dz() * s);
}

// Vertical part of the Laplacian of a nodes array on rows [lo, hi]:
// second-order (matched to the solver) or fourth-order (independent).
// The horizontal part is spectral (-k^2) in both cases.
SpectralArray laplacian_rows(const Grid& g, const SpectralArray& f, int lo,
                             int hi, bool fourth_order) {
  SpectralArray r = g.make_nodes();
  const double idz2 = 1.0 / (g.dz() * g.dz());
  for (int k = 0; k < g.nx(); ++k) {
    const double kk = g.wavenumber(k);
    for (int j = lo; j <= hi; ++j) {
      cplx dzz;
      if (fourth_order) {
        dzz = (-f.at(k, j - 2) + 16.0 * f.at(k, j - 1) - 30.0 * f.at(k, j) +
               16.0 * f.at(k, j + 1) - f.at(k, j + 2)) *
              (idz2 / 12.0);
      } else {
        dzz = (f.at(k, j - 1) - 2.0 * f.at(k, j) + f.at(k, j + 1)) * idz2;
      }
      r.at(k, j) = -kk * kk * f.at(k, j) + dzz;
    }
  }
  return r;
}

}  // namespace

SpectralArray curl_interior(const Grid& g, const SpectralArray& c1_centers,
                            const SpectralArray& c2_nodes) {
  CHST_REQUIRE(c1_centers.nlev == g.nz() && c2_nodes.nlev == g.nz() + 1,
               "curl_interior layout mismatch");
  SpectralArray r = ddx(g, c2_nodes);
  const double idz = 1.0 / g.dz();
  for (int k = 0; k < g.nx(); ++k) {
    r.at(k, 0) = cplx(0.0, 0.0);
    r.at(k, g.nz()) = cplx(0.0, 0.0);
    for (int j = 1; j < g.nz(); ++j)
      r.at(k, j) -= (c1_centers.at(k, j) - c1_centers.at(k, j - 1)) * idz;
  }
  return r;
}

HeatResidualReport interior_heat_residual(const Grid& g,
                                          const BoundaryNoiseModel& m,
                                          double nu, double dt, int n_steps,
                                          const WindowSpec& win, uint64_t path,
                                          bool matched_stencil) {
  const auto [lo, hi] = window_rows(g, win.z_lo, win.z_hi);
  HeatResidualReport rep;

  VelocityField w_prev = make_zero_field(g);
  SpectralArray omega_prev = vorticity(g, w_prev);

  WPathOptions opt;
  opt.collect_stats = false;
  simulate_w(g, m, nu, dt, n_steps, path, opt,
             [&](const VelocityField& w, int step) {
               const double t_prev = (step - 1) * dt;
               const double t_now = step * dt;
               SpectralArray omega = vorticity(g, w);
               if (t_prev >= win.t1 - 1e-12 && t_now <= win.t2 + 1e-12) {
                 // residual = (omega_now - omega_prev)/dt - nu*lap(omega_now)
                 SpectralArray resid =
                     laplacian_rows(g, omega, lo, hi, !matched_stencil);
                 SpectralArray rate = g.make_nodes();
                 for (int k = 0; k < g.nx(); ++k)
                   for (int j = lo; j <= hi; ++j) {
                     rate.at(k, j) =
                         (omega.at(k, j) - omega_prev.at(k, j)) / dt;
                     resid.at(k, j) = rate.at(k, j) - nu * resid.at(k, j);
                   }
                 const double rn = window_norm(g, resid, lo, hi);
                 rep.mean_residual += rn;
                 rep.max_residual = std::max(rep.max_residual, rn);
                 rep.mean_scale += window_norm(g, rate, lo, hi);
                 ++rep.n_pairs;
               }
               omega_prev = std::move(omega);
             });
  if (rep.n_pairs > 0) {
    rep.mean_residual /= rep.n_pairs;
    rep.mean_scale /= rep.n_pairs;
  }
  return rep;
}

double spectral_contrast(const Grid& g, const SpectralArray& omega_nodes,
                         double z_lo, double z_hi, int k_cut) {
  CHST_REQUIRE(omega_nodes.nlev == g.nz() + 1, "contrast wants nodes layout");
  double num = 0.0, den = 0.0;
  for (int k = 0; k < g.nx(); ++k) {
    if (std::abs(g.wavenumber(k)) <= k_cut) continue;
    for (int j = 0; j <= g.nz(); ++j) {
      const double wgt = (j == 0 || j == g.nz()) ? 0.5 : 1.0;
      const double e = wgt * std::norm(omega_nodes.at(k, j));
      den += e;
      const double z = g.z_node(j);
      if (z >= z_lo && z <= z_hi) num += e;
    }
  }
  if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

ContrastReport window_contrast_study(const Grid& g,
                                     const BoundaryNoiseModel& m, double nu,
                                     double dt, int n_steps, double t1,
                                     int k_cut, uint64_t path) {
  ContrastReport rep;
  WPathOptions opt;
  opt.collect_stats = false;
  simulate_w(g, m, nu, dt, n_steps, path, opt,
             [&](const VelocityField& w, int step) {
               if (step * dt < t1 - 1e-12) return;
               const SpectralArray omega = vorticity(g, w);
               const double c = spectral_contrast(g, omega, 0.25 * g.a(),
                                                  0.75 * g.a(), k_cut);
               if (std::isnan(c)) return;
               rep.max_contrast = std::max(rep.max_contrast, c);
               ++rep.n_snapshots;
             });
  return rep;
}

TransportReport transport_residual(const Grid& g, const BoundaryNoiseModel& m,
                                   const MarchParams& p,
                                   const VelocityField& u0, int n_steps,
                                   const WindowSpec& win, uint64_t path) {
  const auto [lo, hi] = window_rows(g, win.z_lo, win.z_hi);
  TransportReport rep;

  DirectSimulator sim(g, m, p, u0, path);
  SpectralArray omega_prev = vorticity(g, sim.u());
  for (int n = 0; n < n_steps; ++n) {
    const double t_prev = n * p.dt;
    const double t_now = (n + 1) * p.dt;
    sim.step();
    SpectralArray omega = vorticity(g, sim.u());
    if (t_prev >= win.t1 - 1e-12 && t_now <= win.t2 + 1e-12) {
      const AdvectionTerm adv = advect(g, sim.u(), sim.u());
      const SpectralArray curl_adv = curl_interior(g, adv.c1, adv.c2);
      SpectralArray lap = laplacian_rows(g, omega, lo, hi, true);
      SpectralArray resid = g.make_nodes();
      for (int k = 0; k < g.nx(); ++k)
        for (int j = lo; j <= hi; ++j)
          resid.at(k, j) = (omega.at(k, j) - omega_prev.at(k, j)) / p.dt +
                           curl_adv.at(k, j) - p.nu * lap.at(k, j);
      rep.mean_residual += window_norm(g, resid, lo, hi);
      ++rep.n_pairs;
    }
    omega_prev = std::move(omega);
  }
  if (rep.n_pairs > 0) rep.mean_residual /= rep.n_pairs;
  return rep;
}

DependenceReport continuous_dependence(const Grid& g,
                                       const BoundaryNoiseModel& m,
                                       const MarchParams& p,
                                       const VelocityField& u0, int n_steps,
                                       const std::vector<double>& deltas,
                                       uint64_t path) {
  CHST_REQUIRE(!deltas.empty(), "need at least one perturbation size");
  DependenceReport rep;
  rep.deltas = deltas;

  // Size of the data: ||u0|| plus the L4-in-time L4-in-space size of w.
  WPathOptions wopt;
  wopt.collect_stats = true;
  const WPath wp = simulate_w(g, m, p.nu, p.dt, n_steps, path, wopt);
  const double u0_norm = norm_l2(g, u0);
  const double w_l4l4 = wp.stats.l4l4();
  rep.base_scale = u0_norm + w_l4l4;

  MarchParams ps = p;
  ps.collect_energy = false;

  SplitSimulator base(g, m, ps, u0, path);

  // Perturbed initial data: u0 -> (1 + delta*scale/||u0||) u0.
  std::vector<std::unique_ptr<SplitSimulator>> ic_runs;
  ic_runs.reserve(deltas.size());
  for (const double d : deltas) {
    VelocityField u0p = u0;
    field_scale(u0p, 1.0 + d * rep.base_scale / u0_norm);
    ic_runs.push_back(std::make_unique<SplitSimulator>(g, m, ps, u0p, path));
  }
  // Perturbed stochastic layer: w -> (1 + delta*scale/||w||_{L4L4}) w.
  std::vector<std::unique_ptr<SplitSimulator>> w_runs;
  w_runs.reserve(deltas.size());
  for (const double d : deltas) {
    MarchParams pw = ps;
    pw.w_advection_scale = 1.0 + d * rep.base_scale / w_l4l4;
    w_runs.push_back(std::make_unique<SplitSimulator>(g, m, pw, u0, path));
  }

  std::vector<double> sup_ic(deltas.size(), 0.0);
  std::vector<double> sup_w(deltas.size(), 0.0);
  for (int n = 0; n < n_steps; ++n) {
    base.step();
    for (size_t i = 0; i < deltas.size(); ++i) {
      ic_runs[i]->step();
      w_runs[i]->step();
      sup_ic[i] = std::max(
          sup_ic[i],
          norm_l2(g, field_lincomb(1.0, base.v(), -1.0, ic_runs[i]->v())));
      sup_w[i] = std::max(
          sup_w[i],
          norm_l2(g, field_lincomb(1.0, base.v(), -1.0, w_runs[i]->v())));
    }
  }
  for (size_t i = 0; i < deltas.size(); ++i) {
    const double pert = deltas[i] * rep.base_scale;
    rep.amp_ic.push_back(sup_ic[i] / pert);
    rep.amp_w.push_back(sup_w[i] / pert);
  }
  return rep;
}

}  // namespace chst
