// chstokes: boundary noise model.
//
// The top-wall forcing is white in time and coloured along the boundary
// circle: W(t, x) = sum_j sigma_j beta_j(t) phi_j(x) with independent
// scalar Brownian motions beta_j, channel shapes
//   phi_0 = 1, phi_1 = cos x, phi_2 = sin x, phi_3 = cos 2x, ...
// and weights sigma_j = sigma0 * (1+j)^(-beta).
//
// Brownian increments are generated by a counter-based RNG on a fixed
// micro time grid of width dt_micro.  A coarse step of width dt (which
// must be an integer multiple of dt_micro) consumes all micro slots it
// covers, so different dt values see the *same* Brownian path — the
// property the time-refinement comparisons rely on.  Every draw is a pure
// function of (seed, path, micro slot, channel); no sampler state exists.
#pragma once

#include <cstdint>
#include <vector>

#include "chstokes/grid.h"

namespace chst {

// SplitMix64 finalizer-based counter hash (stateless, reproducible across
// platforms).  Exposed for tests against the frozen reference values.
uint64_t counter_hash(uint64_t seed, uint64_t stream, uint64_t slot,
                      uint64_t channel);
// Standard normal draw derived from the hash by the Box-Muller map.
double counter_gaussian(uint64_t seed, uint64_t stream, uint64_t slot,
                        uint64_t channel);

// Piecewise-constant time modulation of the noise amplitude: the factor at
// time t is the value attached to the last breakpoint <= t.
struct NoiseSchedule {
  std::vector<std::pair<double, double>> pieces;  // (start time, factor)
  double factor_at(double t) const;
  static NoiseSchedule constant_one();
};

struct BoundaryNoiseModel {
  int channels = 16;        // J
  double sigma0 = 0.1;
  double beta = 1.0;
  uint64_t seed = 1;
  double dt_micro = 1.25e-4;
  NoiseSchedule schedule = NoiseSchedule::constant_one();

  double sigma(int j) const;  // j = 0..channels-1
  // Largest Fourier mode used by any channel shape: ceil((J-1)/2).
  int max_mode() const;
  // Throws ValidationError on inconsistent parameters (channel modes at or
  // above the dealiasing cutoff, non-positive dt_micro, ...).
  void validate(int nx) const;
  // Number of micro slots per coarse step; throws if dt is not an integer
  // multiple of dt_micro.
  int micro_per_step(double dt) const;
  bool pieces_invalid() const;
};

// Spectral coefficients of a channel shape phi_j, scaled by `amount`,
// accumulated into `coef` (length nx, FFT index order).
void add_channel_shape(std::vector<cplx>& coef, int j, cplx amount, int nx);

// Brownian increments Delta beta_j over [step*dt, (step+1)*dt) for all
// channels (variance exactly n_micro * dt_micro each).
std::vector<double> sample_increments(const BoundaryNoiseModel& m, double dt,
                                      uint64_t path, uint64_t step);

// One coarse-step noise impulse: sum_j sigma_j * schedule(t) * dBeta_j *
// phi_j as a boundary field (t is the step's left endpoint).
BoundaryField noise_impulse(const BoundaryNoiseModel& m, const Grid& g,
                            double dt, uint64_t path, uint64_t step, double t);

// Periodic Besov norm B^s_{2,q} of a boundary field: dyadic blocks
// S_0 = {0}, S_m = {k : 2^(m-1) <= |k| < 2^m}, block energies
// e_m = (sum_{k in S_m} 2 pi |c_k|^2)^(1/2) weighted by 2^(s m), combined
// in the little-l^q norm (q = infinity: sup).
double besov_boundary_norm(const Grid& g, const BoundaryField& f, double s,
                           double q);

// Monte Carlo regularity probe of the noise colour: samples random
// unit-variance Gaussian channel superpositions sum_j sigma_j xi_j phi_j
// and reports the Besov norm statistics.  Uses a dedicated stream salt so
// the draws never collide with path simulations.
struct RegularityReport {
  double mean_norm = 0.0;
  double max_norm = 0.0;
  int n_samples = 0;
};
RegularityReport measure_regularity(const Grid& g,
                                    const BoundaryNoiseModel& m, double s,
                                    double q, int n_samples);

}  // namespace chst
