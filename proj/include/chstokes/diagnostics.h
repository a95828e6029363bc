// chstokes: interior regularity and stability diagnostics.
//
// Away from the boundaries the stochastic layer w is smooth; these checks
// quantify that on the discrete solution.
//
// * interior_heat_residual: between consecutive steps the solver's
//   discrete vorticity satisfies the implicit heat relation
//     (omega_{n+1} - omega_n)/dt = nu * laplace(omega_{n+1})
//   exactly (to round-off) at strictly interior nodes when the Laplacian
//   is the solver's own stencil - the pressure drops under the discrete
//   curl and curl commutes with the vertical stencil.  Measured against an
//   *independent* discretization (spectral in x, fourth-order in z) the
//   residual is a pure spatial truncation term of order dz^2, so it
//   shrinks under z-refinement at fixed dt: that is the measurable
//   statement that w is an interior heat solution, not a scheme identity.
//
// * spectral_contrast: fraction of the high-|k| vorticity energy that
//   lives in an interior window; small values mean the rough part of w
//   clings to the forced boundary.
//
// * transport_residual: the total field's vorticity satisfies the
//   advection-diffusion relation up to the explicit/implicit sampling
//   mismatch, which is O(dt); measured with the independent stencils.
//
// * continuous_dependence: lockstep marches of the nonlinear layer under
//   relative perturbations of the initial data and of the stochastic
//   layer; reports amplification factors sup_t ||dv|| / ||perturbation||.
#pragma once

#include <cstdint>
#include <vector>

#include "chstokes/nonlinear.h"

namespace chst {

struct WindowSpec {
  double z_lo = 0.25;
  double z_hi = 0.75;
  double t1 = 0.1;
  double t2 = 0.3;
};

// Discrete curl on interior node rows only (wall rows zero): no boundary
// closure is consumed.
SpectralArray curl_interior(const Grid& g, const SpectralArray& c1_centers,
                            const SpectralArray& c2_nodes);

struct HeatResidualReport {
  double mean_residual = 0.0;  // window L2 of the residual, averaged
  double max_residual = 0.0;
  double mean_scale = 0.0;     // window L2 of (omega_{n+1}-omega_n)/dt
  int n_pairs = 0;
};

// Runs the w-march for n_steps of width dt along `path` and accumulates
// the vorticity heat residual over all step pairs inside [t1, t2], on the
// node rows inside [z_lo, z_hi].  matched_stencil = true uses the solver's
// own second-order vertical stencil (round-off check); false uses the
// independent fourth-order one (truncation measurement).
HeatResidualReport interior_heat_residual(const Grid& g,
                                          const BoundaryNoiseModel& m,
                                          double nu, double dt, int n_steps,
                                          const WindowSpec& win, uint64_t path,
                                          bool matched_stencil = false);

// Energy fraction of modes |k| > k_cut inside the window rows, relative to
// all rows; NaN if there is no energy above the cutoff at all.
double spectral_contrast(const Grid& g, const SpectralArray& omega_nodes,
                         double z_lo, double z_hi, int k_cut);

struct ContrastReport {
  double max_contrast = 0.0;
  int n_snapshots = 0;
};

// Max spectral contrast of the w vorticity over all steps with t >= t1.
ContrastReport window_contrast_study(const Grid& g,
                                     const BoundaryNoiseModel& m, double nu,
                                     double dt, int n_steps, double t1,
                                     int k_cut, uint64_t path);

struct TransportReport {
  double mean_residual = 0.0;
  int n_pairs = 0;
};

// Vorticity transport residual of a direct march (advection sampled at the
// new time level, hence an O(dt) sampling mismatch against the IMEX
// scheme, plus O(dz^2) stencil truncation).
TransportReport transport_residual(const Grid& g, const BoundaryNoiseModel& m,
                                   const MarchParams& p,
                                   const VelocityField& u0, int n_steps,
                                   const WindowSpec& win, uint64_t path);

struct DependenceReport {
  std::vector<double> deltas;
  std::vector<double> amp_ic;  // sup_t ||dv|| / ||du0||
  std::vector<double> amp_w;   // sup_t ||dv|| / ||dw||_{L4 in t, L4 in x}
  double base_scale = 0.0;     // ||u0|| + ||w||_{L4L4}
};

// For each delta: perturb u0 by delta * base_scale in the direction of u0,
// and separately scale the advecting w layer so its L4L4 size moves by
// delta * base_scale; march base and perturbed systems in lockstep on the
// same noise path and record the amplification factors.
DependenceReport continuous_dependence(const Grid& g,
                                       const BoundaryNoiseModel& m,
                                       const MarchParams& p,
                                       const VelocityField& u0, int n_steps,
                                       const std::vector<double>& deltas,
                                       uint64_t path);

}  // namespace chst
