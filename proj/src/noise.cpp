// chstokes: counter-based RNG and the boundary noise model.
#include "chstokes/noise.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chstokes/errors.h"

namespace chst {

namespace {

constexpr uint64_t kSaltA = 0x243F6A8885A308D3ULL;  // pi digits
constexpr uint64_t kSaltB = 0x13198A2E03707344ULL;  // pi digits, next block
// Stream id reserved for the regularity probe so its draws cannot collide
// with path simulations (paths use small stream ids).
constexpr uint64_t kRegularityStream = 0x524547554C415249ULL;

inline uint64_t smix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Map a 64-bit word to (0,1): take the top 53 bits, offset by half a ulp so
// the result is never 0 (safe under log).
inline double unit_double(uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

uint64_t counter_hash(uint64_t seed, uint64_t stream, uint64_t slot,
                      uint64_t channel) {
  uint64_t h = smix(seed);
  h = smix(h ^ stream);
  h = smix(h ^ slot);
  h = smix(h ^ channel);
  return h;
}

double counter_gaussian(uint64_t seed, uint64_t stream, uint64_t slot,
                        uint64_t channel) {
  const uint64_t h = counter_hash(seed, stream, slot, channel);
  const double ua = unit_double(smix(h ^ kSaltA));
  const double ub = unit_double(smix(h ^ kSaltB));
  return std::sqrt(-2.0 * std::log(ua)) *
         std::cos(2.0 * Grid::kPi * ub);
}

// ---------------------------------------------------------------------------
// NoiseSchedule
// ---------------------------------------------------------------------------

double NoiseSchedule::factor_at(double t) const {
  CHST_REQUIRE(!pieces.empty(), "schedule has no pieces");
  double f = pieces.front().second;
  for (const auto& [start, factor] : pieces) {
    if (start <= t) f = factor;
    else break;
  }
  return f;
}

NoiseSchedule NoiseSchedule::constant_one() {
  NoiseSchedule s;
  s.pieces = {{0.0, 1.0}};
  return s;
}

// ---------------------------------------------------------------------------
// BoundaryNoiseModel
// ---------------------------------------------------------------------------

double BoundaryNoiseModel::sigma(int j) const {
  return sigma0 * std::pow(1.0 + j, -beta);
}

int BoundaryNoiseModel::max_mode() const { return channels / 2; }

void BoundaryNoiseModel::validate(int nx) const {
  std::string problems;
  auto add = [&problems](const std::string& p) {
    if (!problems.empty()) problems += "; ";
    problems += p;
  };
  if (channels < 1) add("noise channel count must be >= 1");
  if (!(sigma0 >= 0.0)) add("sigma0 must be >= 0");
  if (!std::isfinite(beta)) add("beta must be finite");
  if (!(dt_micro > 0.0)) add("dt_micro must be > 0");
  if (max_mode() > nx / 3)
    add("noise channels reach Fourier mode " + std::to_string(max_mode()) +
        " which exceeds the dealiased range nx/3 = " + std::to_string(nx / 3));
  if (pieces_invalid()) add("schedule breakpoints must be sorted in time");
  if (!problems.empty()) throw ValidationError("noise model: " + problems);
}

bool BoundaryNoiseModel::pieces_invalid() const {
  if (schedule.pieces.empty()) return true;
  for (size_t i = 1; i < schedule.pieces.size(); ++i)
    if (schedule.pieces[i].first < schedule.pieces[i - 1].first) return true;
  return false;
}

int BoundaryNoiseModel::micro_per_step(double dt) const {
  CHST_REQUIRE(dt > 0.0, "step size must be positive");
  const double ratio = dt / dt_micro;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
    throw ValidationError(
        "dt = " + std::to_string(dt) + " is not an integer multiple of " +
        "dt_micro = " + std::to_string(dt_micro) +
        " (required so that every step size sees the same Brownian path)");
  return static_cast<int>(n);
}

void add_channel_shape(std::vector<cplx>& coef, int j, cplx amount, int nx) {
  CHST_REQUIRE(static_cast<int>(coef.size()) == nx, "coef length != nx");
  if (j == 0) {
    coef[0] += amount;
    return;
  }
  const int m = (j % 2 == 1) ? (j + 1) / 2 : j / 2;
  CHST_REQUIRE(m >= 1 && m < nx / 2, "channel mode out of range");
  if (j % 2 == 1) {
    // cos(m x): half weight on each of +-m.
    coef[m] += 0.5 * amount;
    coef[nx - m] += 0.5 * amount;
  } else {
    // sin(m x) = (e^{imx} - e^{-imx}) / (2i).
    coef[m] += cplx(0.0, -0.5) * amount;
    coef[nx - m] += cplx(0.0, 0.5) * amount;
  }
}

std::vector<double> sample_increments(const BoundaryNoiseModel& m, double dt,
                                      uint64_t path, uint64_t step) {
  const int n_micro = m.micro_per_step(dt);
  const double root = std::sqrt(m.dt_micro);
  std::vector<double> dw(m.channels, 0.0);
  for (int j = 0; j < m.channels; ++j) {
    double s = 0.0;
    const uint64_t base = step * static_cast<uint64_t>(n_micro);
    for (int q = 0; q < n_micro; ++q)
      s += counter_gaussian(m.seed, path, base + q, static_cast<uint64_t>(j));
    dw[j] = root * s;
  }
  return dw;
}

BoundaryField noise_impulse(const BoundaryNoiseModel& m, const Grid& g,
                            double dt, uint64_t path, uint64_t step,
                            double t) {
  const std::vector<double> dw = sample_increments(m, dt, path, step);
  const double factor = m.schedule.factor_at(t);
  BoundaryField f(g.nx());
  for (int j = 0; j < m.channels; ++j)
    add_channel_shape(f.coef, j, cplx(m.sigma(j) * factor * dw[j], 0.0),
                      g.nx());
  return f;
}

// ---------------------------------------------------------------------------
// Besov norms on the boundary circle
// ---------------------------------------------------------------------------

double besov_boundary_norm(const Grid& g, const BoundaryField& f, double s,
                           double q) {
  CHST_REQUIRE(f.nx == g.nx(), "boundary field length mismatch");
  const int nx = g.nx();
  const bool sup_norm = std::isinf(q) || q > 1e8;
  CHST_REQUIRE(sup_norm || q >= 1.0, "Besov q must be >= 1 or infinite");

  double accum = 0.0;
  double worst = 0.0;
  int m = 0;
  for (int lo = 0;; ++m) {
    // block S_0 = {0}; S_m = {k : 2^(m-1) <= |k| < 2^m}
    const int hi = (m == 0) ? 0 : (1 << m) - 1;
    lo = (m == 0) ? 0 : (1 << (m - 1));
    if (lo > nx / 2) break;
    double e2 = 0.0;
    for (int k = lo; k <= std::min(hi, nx / 2); ++k) {
      e2 += std::norm(f.coef[k]);
      if (k != 0 && k != nx / 2) e2 += std::norm(f.coef[nx - k]);
    }
    const double weighted = std::pow(2.0, s * m) * std::sqrt(2.0 * Grid::kPi * e2);
    if (sup_norm)
      worst = std::max(worst, weighted);
    else
      accum += std::pow(weighted, q);
  }
  return sup_norm ? worst : std::pow(accum, 1.0 / q);
}

RegularityReport measure_regularity(const Grid& g, const BoundaryNoiseModel& m,
                                    double s, double q, int n_samples) {
  CHST_REQUIRE(n_samples >= 1, "need at least one sample");
  RegularityReport rep;
  rep.n_samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    // Random direction: Gaussian vector normalized to unit length.
    std::vector<double> xi(m.channels);
    double nrm2 = 0.0;
    for (int j = 0; j < m.channels; ++j) {
      xi[j] = counter_gaussian(m.seed, kRegularityStream,
                               static_cast<uint64_t>(i),
                               static_cast<uint64_t>(j));
      nrm2 += xi[j] * xi[j];
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    BoundaryField f(g.nx());
    for (int j = 0; j < m.channels; ++j)
      add_channel_shape(f.coef, j, cplx(m.sigma(j) * xi[j] * inv, 0.0),
                        g.nx());
    const double norm = besov_boundary_norm(g, f, s, q);
    rep.mean_norm += norm;
    rep.max_norm = std::max(rep.max_norm, norm);
  }
  rep.mean_norm /= n_samples;
  return rep;
}

}  // namespace chst
