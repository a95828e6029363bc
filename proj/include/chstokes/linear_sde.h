// chstokes: the linear stochastic layer w.
//
// w solves the Stokes system with zero initial data, no-slip bottom wall,
// and the white-in-time boundary shear forcing at the top wall.  One
// implicit Euler step of width dt applies the resolvent with shift 1/dt:
//   (1/dt) w_{n+1} - nu laplace(w_{n+1}) + grad(pi) = w_n / dt,
//   d(w1)/dz |_{z=a} = impulse / dt,
// so the boundary impulse (sigma-weighted Brownian increment) acts as the
// Neumann datum integrated over the step.
//
// For the constant-in-x noise channel the horizontal mean of w1 is an
// Ornstein-Uhlenbeck process in z whose covariance obeys an exact affine
// recursion; ou_mode0_variance propagates that recursion with dense linear
// algebra and provides the independent statistics oracle for Monte Carlo
// ensembles of the path solver.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "chstokes/elliptic.h"
#include "chstokes/field.h"
#include "chstokes/noise.h"

namespace chst {

// One implicit step of the boundary-driven Stokes system.  `resolvent`
// must have been built with lambda = 1/dt and the marching viscosity.
VelocityField step_stochastic_stokes(const Grid& g, const VelocityField& w,
                                     const BoundaryField& impulse, double dt,
                                     const StokesResolvent& resolvent);

struct WPathStats {
  double sup_l2 = 0.0;       // sup_n ||w(t_n)||_L2
  double l4l4_accum = 0.0;   // sum_n dt * ||w(t_n)||_L4^4 (left endpoints)
  double l4l4() const;       // (accum)^(1/4)
};

struct WPathOptions {
  int snapshot_stride = 0;   // 0: keep no snapshots
  bool collect_stats = true;
};

struct WPath {
  VelocityField final;
  WPathStats stats;
  std::vector<double> snapshot_times;
  std::vector<VelocityField> snapshots;
};

// March w from 0 to T = n_steps * dt along the given noise path.
// `on_step` (optional) observes the state after every step.
WPath simulate_w(const Grid& g, const BoundaryNoiseModel& m, double nu,
                 double dt, int n_steps, uint64_t path,
                 const WPathOptions& opt = {},
                 const std::function<void(const VelocityField&, int)>&
                     on_step = nullptr);

// Exact single-mode covariance recursion for the horizontal mean of w1
// (the k = 0 slice).  Returns the variance of w1 at the center nearest
// z_star after n_steps steps of width dt.  Only channel 0 (the constant
// shape) forces k = 0; its weight is sigma(0) = sigma0.
double ou_mode0_variance(int nz, double a, double nu,
                         const BoundaryNoiseModel& m, double dt, int n_steps,
                         double z_star);

// Index of the center nearest z_star (the observable the Monte Carlo
// comparison reads).
int center_index_near(const Grid& g, double z_star);

}  // namespace chst
