// chstokes: run configuration.
//
// Sectioned key = value text ('#' or ';' start comments).  Unknown
// sections or keys are rejected; every violation found is reported in one
// ValidationError so a bad file never needs several round trips.
//
//   [grid]        nx, nz, a
//   [time]        T, dt
//   [physics]     nu, blowup_threshold
//   [ic]          preset (zero | single_mode), k, m, amplitude
//   [noise]       J, sigma0, beta, seed, dt_micro, schedule
//   [output]      dir, snapshot_stride, write_snapshots
//   [picard]      T_bar, tol, max_iter
//   [diagnostics] window_lo, window_hi, t1, t2, z_star, contrast_threshold
//
// schedule is "t0:f0,t1:f1,..." (piecewise-constant factors with sorted
// breakpoints; the factor at time t comes from the last breakpoint <= t).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chstokes/elliptic.h"
#include "chstokes/field.h"
#include "chstokes/noise.h"

namespace chst {

struct RunConfig {
  struct {
    int nx = 64;
    int nz = 64;
    double a = 1.0;
  } grid;
  struct {
    double T = 1.0;
    double dt = 1e-3;
  } time;
  struct {
    double nu = 1.0;
    double blowup_threshold = 1e8;
  } physics;
  struct {
    std::string preset = "single_mode";
    int k = 1;
    int m = 1;
    double amplitude = 0.1;
  } ic;
  struct {
    int J = 16;
    double sigma0 = 0.1;
    double beta = 1.0;
    uint64_t seed = 1;
    double dt_micro = 1.25e-4;
    std::string schedule = "0:1";
  } noise;
  struct {
    std::string dir = "out";
    int snapshot_stride = 0;
    bool write_snapshots = false;
  } output;
  struct {
    double T_bar = 0.2;
    double tol = 1e-8;
    int max_iter = 25;
  } picard;
  struct {
    double window_lo = 0.25;
    double window_hi = 0.75;
    double t1 = 0.1;
    double t2 = 0.3;
    double z_star = 0.75;
    double contrast_threshold = 0.1;
  } diagnostics;

  int steps() const;  // round(T/dt), validated to be >= 1

  // Assemble derived objects (validate() the noise model against nx first).
  BoundaryNoiseModel noise_model() const;
  NoiseSchedule parse_schedule() const;
};

// Parse text; throws ValidationError listing *all* problems found.
RunConfig parse_config_text(const std::string& text);
// Read a file and parse it (ValidationError if unreadable).
RunConfig load_config_file(const std::string& path);
// Canonical round-trippable serialization (stable key order, %.17g floats).
std::string echo_config(const RunConfig& c);

// Cross-field validation beyond syntax (dt vs dt_micro, IC mode vs grid,
// ...); throws with the full list of violations.
void validate_config(const RunConfig& c);

// Initial condition described by [ic], projected to the discrete
// solenoidal space.
VelocityField make_initial_condition(const Grid& g, const RunConfig& c,
                                     const HelmholtzProjector& proj);

}  // namespace chst
