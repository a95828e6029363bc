// chstokes: nonlinear layer marchers, energy ledger, Picard iteration.
#include "chstokes/nonlinear.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace chst {

namespace {

void check_finite_and_bounded(const Grid& g, const VelocityField& f,
                              double threshold, const char* what) {
  const double l2 = norm_l2(g, f);
  if (!std::isfinite(l2) || l2 > threshold)
    throw BlowUpError(std::string(what) + " left the finite regime at t = " +
                      std::to_string(f.time) + " (L2 norm " +
                      std::to_string(l2) + ", threshold " +
                      std::to_string(threshold) + ")");
}

VelocityField advection_as_field(const Grid& g, AdvectionTerm&& t) {
  VelocityField f = make_zero_field(g);
  f.u1 = std::move(t.c1);
  f.u2 = std::move(t.c2);
  f.solenoidal = false;
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// EnergyLedger
// ---------------------------------------------------------------------------

void EnergyLedger::start(double nu, double u0_sq, double grad0, double b0) {
  nu_ = nu;
  u0_sq_ = u0_sq;
  int_grad_ = 0.0;
  int_b_ = 0.0;
  prev_grad_ = grad0;
  prev_b_ = b0;
  started_ = true;
}

void EnergyLedger::accumulate(double dt, double grad_sq_now, double b_now) {
  CHST_REQUIRE(started_, "ledger not started");
  int_grad_ += 0.5 * dt * (prev_grad_ + grad_sq_now);
  int_b_ += 0.5 * dt * (prev_b_ + b_now);
  prev_grad_ = grad_sq_now;
  prev_b_ = b_now;
}

double EnergyLedger::residual(double v_sq_now) const {
  CHST_REQUIRE(started_, "ledger not started");
  return v_sq_now + 2.0 * nu_ * int_grad_ - u0_sq_ - 2.0 * int_b_;
}

double EnergyLedger::normalized_residual(double v_sq_now) const {
  const double scale = std::max(v_sq_now, u0_sq_) + 2.0 * nu_ * int_grad_ +
                       2.0 * std::abs(int_b_);
  return residual(v_sq_now) / std::max(scale, 1e-300);
}

// ---------------------------------------------------------------------------
// Step primitives
// ---------------------------------------------------------------------------

VelocityField step_v(const Grid& g, const VelocityField& v,
                     const VelocityField& w_adv, double dt,
                     const StokesResolvent& resolvent,
                     const HelmholtzProjector& proj, double blowup_threshold) {
  const VelocityField s = field_lincomb(1.0, v, 1.0, w_adv);
  const VelocityField forcing =
      proj.project(advection_as_field(g, advect(g, s, s)));
  const VelocityField rhs = field_lincomb(1.0 / dt, v, -1.0, forcing);
  StokesSolution sol = resolvent.solve(rhs, BoundaryField(g.nx()));
  sol.u.time = v.time + dt;
  check_finite_and_bounded(g, sol.u, blowup_threshold, "v");
  return std::move(sol.u);
}

VelocityField step_direct(const Grid& g, const VelocityField& u,
                          const BoundaryField& impulse, double dt,
                          const StokesResolvent& resolvent,
                          const HelmholtzProjector& proj,
                          double blowup_threshold, bool nonlinear) {
  VelocityField rhs = u;
  field_scale(rhs, 1.0 / dt);
  if (nonlinear) {
    const VelocityField forcing =
        proj.project(advection_as_field(g, advect(g, u, u)));
    rhs = field_lincomb(1.0, rhs, -1.0, forcing);
  }
  BoundaryField datum(g.nx());
  for (int k = 0; k < g.nx(); ++k) datum.coef[k] = impulse.coef[k] / dt;
  StokesSolution sol = resolvent.solve(rhs, datum);
  sol.u.time = u.time + dt;
  check_finite_and_bounded(g, sol.u, blowup_threshold, "u");
  return std::move(sol.u);
}

// ---------------------------------------------------------------------------
// SplitSimulator
// ---------------------------------------------------------------------------

SplitSimulator::SplitSimulator(const Grid& g, const BoundaryNoiseModel& m,
                               const MarchParams& p, const VelocityField& u0,
                               uint64_t path)
    : grid_(&g),
      model_(m),
      params_(p),
      path_(path),
      resolvent_(g, 1.0 / p.dt, p.nu),
      proj_(g),
      v_(u0),
      w_(make_zero_field(g)) {
  CHST_REQUIRE(u0.solenoidal, "initial data must be projected first");
  model_.validate(g.nx());
  v_.time = 0.0;
  if (params_.collect_energy)
    ledger_.start(params_.nu, norm_l2_sq(g, v_), grad_sq(g, v_), 0.0);
}

VelocityField SplitSimulator::total() const {
  return field_lincomb(1.0, v_, params_.w_advection_scale, w_);
}

void SplitSimulator::step() {
  const Grid& g = *grid_;
  const double dt = params_.dt;
  const double t_n = steps_ * dt;
  const BoundaryField impulse = noise_impulse(
      model_, g, dt, path_, static_cast<uint64_t>(steps_), t_n);
  w_ = step_stochastic_stokes(g, w_, impulse, dt, resolvent_);
  if (params_.w_advection_scale == 1.0) {
    v_ = step_v(g, v_, w_, dt, resolvent_, proj_, params_.blowup_threshold);
  } else {
    VelocityField w_adv = w_;
    field_scale(w_adv, params_.w_advection_scale);
    v_ = step_v(g, v_, w_adv, dt, resolvent_, proj_,
                params_.blowup_threshold);
  }
  ++steps_;
  if (params_.collect_energy) {
    VelocityField w_adv = w_;
    if (params_.w_advection_scale != 1.0)
      field_scale(w_adv, params_.w_advection_scale);
    const VelocityField s = field_lincomb(1.0, v_, 1.0, w_adv);
    const double b_now = trilinear_form(g, s, v_, w_adv);
    ledger_.accumulate(dt, grad_sq(g, v_), b_now);
  }
}

void SplitSimulator::run(int n_steps) {
  for (int i = 0; i < n_steps; ++i) step();
}

double SplitSimulator::energy_residual() const {
  return ledger_.residual(norm_l2_sq(*grid_, v_));
}

double SplitSimulator::normalized_energy_residual() const {
  return ledger_.normalized_residual(norm_l2_sq(*grid_, v_));
}

// ---------------------------------------------------------------------------
// DirectSimulator
// ---------------------------------------------------------------------------

DirectSimulator::DirectSimulator(const Grid& g, const BoundaryNoiseModel& m,
                                 const MarchParams& p, const VelocityField& u0,
                                 uint64_t path, bool nonlinear)
    : grid_(&g),
      model_(m),
      params_(p),
      path_(path),
      nonlinear_(nonlinear),
      resolvent_(g, 1.0 / p.dt, p.nu),
      proj_(g),
      u_(u0) {
  CHST_REQUIRE(u0.solenoidal, "initial data must be projected first");
  model_.validate(g.nx());
  u_.time = 0.0;
}

void DirectSimulator::step() {
  const Grid& g = *grid_;
  const double dt = params_.dt;
  const double t_n = steps_ * dt;
  const BoundaryField impulse = noise_impulse(
      model_, g, dt, path_, static_cast<uint64_t>(steps_), t_n);
  u_ = step_direct(g, u_, impulse, dt, resolvent_, proj_,
                   params_.blowup_threshold, nonlinear_);
  ++steps_;
}

void DirectSimulator::run(int n_steps) {
  for (int i = 0; i < n_steps; ++i) step();
}

SplitCompareResult compare_split_direct(const Grid& g,
                                        const BoundaryNoiseModel& m,
                                        const MarchParams& p,
                                        const VelocityField& u0, int n_steps,
                                        uint64_t path) {
  MarchParams ps = p;
  ps.collect_energy = false;
  SplitSimulator split(g, m, ps, u0, path);
  DirectSimulator direct(g, m, ps, u0, path);
  SplitCompareResult r;
  r.gap.reserve(n_steps);
  for (int n = 0; n < n_steps; ++n) {
    split.step();
    direct.step();
    const VelocityField diff =
        field_lincomb(1.0, split.total(), -1.0, direct.u());
    const double gap = norm_l2(g, diff);
    r.gap.push_back(gap);
    r.sup_gap = std::max(r.sup_gap, gap);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Picard iteration
// ---------------------------------------------------------------------------

namespace {

// One marched iterate: v_{m+1} = resolvent( v_m/dt - P[ advect(v_m, v_m)
// + cross_m ] ) with the w-coupling terms `cross_m` frozen from the
// previous iterate.
std::vector<VelocityField> picard_march(
    const Grid& g, const VelocityField& u0, double dt, int n_steps,
    const StokesResolvent& R, const HelmholtzProjector& proj,
    const std::vector<AdvectionTerm>& cross, double blowup_threshold) {
  std::vector<VelocityField> traj;
  traj.reserve(n_steps + 1);
  traj.push_back(u0);
  traj.front().time = 0.0;
  for (int m = 0; m < n_steps; ++m) {
    const VelocityField& vm = traj.back();
    AdvectionTerm adv = advect(g, vm, vm);
    axpy(cplx(1.0, 0.0), cross[m].c1, adv.c1);
    axpy(cplx(1.0, 0.0), cross[m].c2, adv.c2);
    const VelocityField forcing =
        proj.project(advection_as_field(g, std::move(adv)));
    const VelocityField rhs = field_lincomb(1.0 / dt, vm, -1.0, forcing);
    StokesSolution sol = R.solve(rhs, BoundaryField(g.nx()));
    sol.u.time = (m + 1) * dt;
    check_finite_and_bounded(g, sol.u, blowup_threshold, "picard iterate");
    traj.push_back(std::move(sol.u));
  }
  return traj;
}

double sup_distance(const Grid& g, const std::vector<VelocityField>& a,
                    const std::vector<VelocityField>& b) {
  CHST_REQUIRE(a.size() == b.size(), "trajectory length mismatch");
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, norm_l2(g, field_lincomb(1.0, a[i], -1.0, b[i])));
  return worst;
}

}  // namespace

PicardReport picard_iterate(const Grid& g, const BoundaryNoiseModel& m,
                            const VelocityField& u0, const PicardParams& p,
                            uint64_t path) {
  CHST_REQUIRE(u0.solenoidal, "initial data must be projected first");
  m.validate(g.nx());
  CHST_REQUIRE(p.T_bar > 0.0 && p.dt > 0.0, "window and step must be positive");

  const StokesResolvent R(g, 1.0 / p.dt, p.nu);
  const HelmholtzProjector proj(g);

  PicardReport rep;
  double T_bar = p.T_bar;

  for (int halving = 0; halving <= p.max_halvings; ++halving) {
    const int n_steps = std::max(1, static_cast<int>(std::llround(T_bar / p.dt)));
    rep.T_bar_used = n_steps * p.dt;
    rep.halvings = halving;
    rep.diffs.clear();
    rep.ratios.clear();

    // The frozen stochastic layer: w at every step time (w[m] at t_m),
    // plus its self-advection per step (uses the updated w, matching the
    // marched scheme).
    WPathOptions wopt;
    wopt.collect_stats = false;
    wopt.snapshot_stride = 1;
    const WPath wp = simulate_w(g, m, p.nu, p.dt, n_steps, path, wopt);
    std::vector<AdvectionTerm> adv_ww;
    adv_ww.reserve(n_steps);
    for (int mstep = 0; mstep < n_steps; ++mstep)
      adv_ww.push_back(
          advect(g, wp.snapshots[mstep + 1], wp.snapshots[mstep + 1]));

    // Iterate from v^0 = 0.
    std::vector<VelocityField> prev(n_steps + 1, make_zero_field(g));
    for (int mstep = 0; mstep <= n_steps; ++mstep)
      prev[mstep].time = mstep * p.dt;

    bool contraction_failed = false;
    for (int it = 1; it <= p.max_iter; ++it) {
      // Cross terms frozen at the previous iterate.
      std::vector<AdvectionTerm> cross;
      cross.reserve(n_steps);
      for (int mstep = 0; mstep < n_steps; ++mstep) {
        const VelocityField& wm = wp.snapshots[mstep + 1];
        AdvectionTerm c = advect(g, prev[mstep], wm);
        const AdvectionTerm c2 = advect(g, wm, prev[mstep]);
        axpy(cplx(1.0, 0.0), c2.c1, c.c1);
        axpy(cplx(1.0, 0.0), c2.c2, c.c2);
        axpy(cplx(1.0, 0.0), adv_ww[mstep].c1, c.c1);
        axpy(cplx(1.0, 0.0), adv_ww[mstep].c2, c.c2);
        cross.push_back(std::move(c));
      }
      std::vector<VelocityField> cur = picard_march(
          g, u0, p.dt, n_steps, R, proj, cross, p.blowup_threshold);
      const double diff = sup_distance(g, cur, prev);
      rep.diffs.push_back(diff);
      if (rep.diffs.size() >= 2) {
        const double prev_diff = rep.diffs[rep.diffs.size() - 2];
        rep.ratios.push_back(prev_diff > 0.0 ? diff / prev_diff : 0.0);
      }
      prev = std::move(cur);
      if (diff <= p.tol) {
        rep.converged = true;
        break;
      }
      // Contraction watch: once past the first comparison, a ratio at or
      // above one means the window is too long.
      if (!rep.ratios.empty() && rep.ratios.back() >= 1.0 && it >= 3) {
        contraction_failed = true;
        break;
      }
    }

    if (rep.converged || !contraction_failed) {
      rep.v_final = prev.back();
      if (p.keep_trajectory) rep.v_trajectory = std::move(prev);
      return rep;
    }
    T_bar *= 0.5;  // halve the window and retry
  }
  rep.converged = false;
  return rep;
}

}  // namespace chst
