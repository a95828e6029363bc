// chstokes: the nonlinear layer v and the coupled time marchers.
//
// The total velocity splits as u = v + w: w is the boundary-driven Stokes
// layer (linear_sde.h) and v absorbs the nonlinearity with homogeneous
// boundary data:
//   dv/dt + (v+w).grad(v+w) + grad(P) = nu laplace(v),   v(0) = u0.
// One IMEX step treats the advection explicitly (assembled from v_n and
// the *updated* w_{n+1}, then projected) and the Stokes part implicitly
// through the same resolvent the w-march uses.
//
// The energy ledger accumulates the modified balance
//   ||v(T)||^2 + 2 nu int ||grad v||^2
//     = ||u0||^2 + 2 int [ b(v,v,w) + b(w,v,w) ]
// with trapezoid quadrature in time; its residual is a pure time-
// discretization effect (the skew advection keeps b(s,s,v) energy-exact
// in space) and halves with dt.
//
// DirectSimulator marches the unsplit field u with the noise impulse as
// its own boundary datum; with the noise switched off it reproduces the
// split march bit-for-bit, and under noise the two stay O(dt) apart.
//
// picard_iterate solves the v-equation on [0, T_bar] by fixed-point
// iteration: each iterate marches with its own self-advection while the
// w-coupling terms are frozen at the previous iterate.  The map contracts
// for small T_bar (T_bar is halved adaptively when contraction fails),
// and its fixed point is exactly the marched v.
#pragma once

#include <cstdint>
#include <vector>

#include "chstokes/elliptic.h"
#include "chstokes/field.h"
#include "chstokes/linear_sde.h"
#include "chstokes/noise.h"

namespace chst {

class EnergyLedger {
 public:
  // grad0 / b0: the integrands at t = 0 (b0 = 0 when w(0) = 0).
  void start(double nu, double u0_sq, double grad0, double b0);
  // Trapezoid-accumulate with the integrands at the new time level.
  void accumulate(double dt, double grad_sq_now, double b_now);
  // ||v||^2 + 2 nu int grad - ||u0||^2 - 2 int b at the current time.
  double residual(double v_sq_now) const;
  // Residual divided by the size of the balance's constituents.
  double normalized_residual(double v_sq_now) const;
  double dissipation_integral() const { return int_grad_; }
  double transfer_integral() const { return int_b_; }

 private:
  double nu_ = 0.0, u0_sq_ = 0.0;
  double int_grad_ = 0.0, int_b_ = 0.0;
  double prev_grad_ = 0.0, prev_b_ = 0.0;
  bool started_ = false;
};

struct MarchParams {
  double nu = 1.0;
  double dt = 1e-3;
  double blowup_threshold = 1e8;
  // v advects against (w_advection_scale * w); 1 is the plain system,
  // other values drive the continuous-dependence probes.
  double w_advection_scale = 1.0;
  bool collect_energy = true;
};

// One IMEX step of the v-equation against the advecting layer w_adv.
VelocityField step_v(const Grid& g, const VelocityField& v,
                     const VelocityField& w_adv, double dt,
                     const StokesResolvent& resolvent,
                     const HelmholtzProjector& proj, double blowup_threshold);

// One IMEX step of the unsplit field u (impulse = integrated noise datum;
// nonlinear = false drops the advection and reproduces the w-march).
VelocityField step_direct(const Grid& g, const VelocityField& u,
                          const BoundaryField& impulse, double dt,
                          const StokesResolvent& resolvent,
                          const HelmholtzProjector& proj,
                          double blowup_threshold, bool nonlinear);

class SplitSimulator {
 public:
  SplitSimulator(const Grid& g, const BoundaryNoiseModel& m,
                 const MarchParams& p, const VelocityField& u0, uint64_t path);

  void step();
  void run(int n_steps);

  const VelocityField& v() const { return v_; }
  const VelocityField& w() const { return w_; }
  // v + (scale * w): the advecting total field.
  VelocityField total() const;
  double time() const { return steps_ * params_.dt; }
  int steps_done() const { return steps_; }
  const EnergyLedger& ledger() const { return ledger_; }
  double energy_residual() const;
  double normalized_energy_residual() const;

 private:
  const Grid* grid_;
  BoundaryNoiseModel model_;
  MarchParams params_;
  uint64_t path_;
  StokesResolvent resolvent_;
  HelmholtzProjector proj_;
  VelocityField v_, w_;
  EnergyLedger ledger_;
  int steps_ = 0;
};

class DirectSimulator {
 public:
  DirectSimulator(const Grid& g, const BoundaryNoiseModel& m,
                  const MarchParams& p, const VelocityField& u0, uint64_t path,
                  bool nonlinear = true);

  void step();
  void run(int n_steps);
  const VelocityField& u() const { return u_; }
  double time() const { return steps_ * params_.dt; }
  int steps_done() const { return steps_; }

 private:
  const Grid* grid_;
  BoundaryNoiseModel model_;
  MarchParams params_;
  uint64_t path_;
  bool nonlinear_;
  StokesResolvent resolvent_;
  HelmholtzProjector proj_;
  VelocityField u_;
  int steps_ = 0;
};

// Lockstep split-vs-direct comparison over n_steps; returns the gap series
// ||(v+w)(t_n) - u(t_n)||_L2 for n = 1..n_steps.
struct SplitCompareResult {
  std::vector<double> gap;  // per step
  double sup_gap = 0.0;
};
SplitCompareResult compare_split_direct(const Grid& g,
                                        const BoundaryNoiseModel& m,
                                        const MarchParams& p,
                                        const VelocityField& u0, int n_steps,
                                        uint64_t path);

// ---------------------------------------------------------------------------
// Picard iteration on [0, T_bar]
// ---------------------------------------------------------------------------

struct PicardParams {
  double T_bar = 0.2;
  double dt = 1e-3;
  double tol = 1e-8;
  int max_iter = 25;
  int max_halvings = 8;
  double nu = 1.0;
  double blowup_threshold = 1e8;
  bool keep_trajectory = true;
};

struct PicardReport {
  double T_bar_used = 0.0;
  int halvings = 0;
  bool converged = false;
  std::vector<double> diffs;   // sup-in-time L2 iterate distance
  std::vector<double> ratios;  // diffs[i] / diffs[i-1]
  VelocityField v_final;
  std::vector<VelocityField> v_trajectory;  // final iterate at all t_m
};

PicardReport picard_iterate(const Grid& g, const BoundaryNoiseModel& m,
                            const VelocityField& u0, const PicardParams& p,
                            uint64_t path);

}  // namespace chst
