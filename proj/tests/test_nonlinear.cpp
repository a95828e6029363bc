// Nonlinear layer tests: energy ledger arithmetic, split/direct agreement,
// first-order convergence of the discrete energy balance, and the Picard
// window iteration (contraction, fixed point = marched solution, window
// halving, blow-up detection).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "chstokes/nonlinear.h"

using namespace chst;

namespace {

// A generic smooth solenoidal initial condition: two stream-function modes,
// pushed through the projector so the discrete divergence is exactly zero
// (the samplers are only solenoidal in the continuum).
VelocityField smooth_initial(const Grid& g, double amplitude) {
  const HelmholtzProjector proj(g);
  VelocityField f = field_lincomb(1.0, streamfunction_mode_field(g, 1, 1, amplitude),
                                  0.4, streamfunction_mode_field(g, 2, 2, amplitude));
  return proj.project(f);
}

BoundaryNoiseModel quiet_model() {
  BoundaryNoiseModel m;
  m.channels = 4;
  m.sigma0 = 0.0;  // noise off: the Brownian impulses all vanish
  m.seed = 42;
  return m;
}

BoundaryNoiseModel noisy_model(double sigma0) {
  BoundaryNoiseModel m;
  m.channels = 4;
  m.sigma0 = sigma0;
  m.beta = 1.0;
  m.seed = 42;
  m.dt_micro = 1.25e-4;
  return m;
}

double field_distance(const Grid& g, const VelocityField& a,
                      const VelocityField& b) {
  return norm_l2(g, field_lincomb(1.0, a, -1.0, b));
}

}  // namespace

TEST_CASE("energy ledger applies the trapezoid rule to both integrals") {
  // Hand arithmetic: start(nu=2, u0_sq=5, grad0=1, b0=0.5) then
  // accumulate(dt=0.1, grad=3, b=1.5) gives
  //   int_grad = 0.5*0.1*(1+3)   = 0.2
  //   int_b    = 0.5*0.1*(0.5+1.5) = 0.1
  //   residual(v_sq) = v_sq + 2*2*0.2 - 5 - 2*0.1 = v_sq - 4.4.
  EnergyLedger led;
  led.start(2.0, 5.0, 1.0, 0.5);
  led.accumulate(0.1, 3.0, 1.5);
  CHECK(led.dissipation_integral() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(led.transfer_integral() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(led.residual(4.4) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(led.residual(5.0) == doctest::Approx(0.6).epsilon(1e-13));
  // Normalized form divides by max(v_sq, u0_sq) + 2 nu int_grad + 2|int_b|
  // = 5 + 0.8 + 0.2 = 6.
  CHECK(led.normalized_residual(5.0) == doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("ledger refuses to accumulate before start") {
  EnergyLedger led;
  CHECK_THROWS_AS(led.accumulate(0.1, 1.0, 0.0), ContractError);
  CHECK_THROWS_AS(led.residual(1.0), ContractError);
}

TEST_CASE("marchers reject initial data that was not projected") {
  Grid g(16, 12, 1.0);
  const VelocityField raw = streamfunction_mode_field(g, 1, 1, 0.1);
  MarchParams p;
  CHECK_FALSE(raw.solenoidal);
  CHECK_THROWS_AS(SplitSimulator(g, quiet_model(), p, raw, 1), ContractError);
  CHECK_THROWS_AS(DirectSimulator(g, quiet_model(), p, raw, 1), ContractError);
  PicardParams pp;
  CHECK_THROWS_AS(picard_iterate(g, quiet_model(), raw, pp, 1), ContractError);
}

TEST_CASE("step primitives advance time and stay admissible") {
  Grid g(32, 24, 1.0);
  const double dt = 1e-3, nu = 0.3;
  const StokesResolvent res(g, 1.0 / dt, nu);
  const HelmholtzProjector proj(g);
  VelocityField v = smooth_initial(g, 0.5);
  v.time = 0.25;

  const VelocityField vn = step_v(g, v, make_zero_field(g), dt, res, proj, 1e8);
  CHECK(vn.time == doctest::Approx(0.251).epsilon(1e-12));
  CHECK(vn.solenoidal);
  CHECK(divergence_max(g, vn) < 1e-9 * norm_l2(g, vn));
  for (int k = 0; k < g.nx(); ++k) {
    CHECK(std::abs(vn.u2.at(k, 0)) == 0.0);
    CHECK(std::abs(vn.u2.at(k, g.nz())) == 0.0);
    CHECK(std::abs(vn.top_shear.coef[k]) == 0.0);  // homogeneous datum
  }

  BoundaryField imp(g.nx());
  imp.coef[0] = 0.002;
  const VelocityField un =
      step_direct(g, v, imp, dt, res, proj, 1e8, /*nonlinear=*/true);
  CHECK(un.time == doctest::Approx(0.251).epsilon(1e-12));
  // The boundary impulse enters as a Neumann datum of size impulse/dt.
  CHECK(un.top_shear.coef[0].real() == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("with the noise off the split and direct marches coincide exactly") {
  Grid g(32, 24, 1.0);
  MarchParams p;
  p.nu = 0.1;
  p.dt = 1e-3;
  const VelocityField u0 = smooth_initial(g, 0.5);

  // Same arithmetic is performed on both sides (w stays identically zero,
  // and x + 0 == x in floating point), so the gap is exactly zero.
  const SplitCompareResult r =
      compare_split_direct(g, quiet_model(), p, u0, 20, 3);
  REQUIRE(r.gap.size() == 20);
  CHECK(r.sup_gap == 0.0);

  SplitSimulator split(g, quiet_model(), p, u0, 3);
  split.run(5);
  CHECK(norm_l2(g, split.w()) == 0.0);
  CHECK(field_distance(g, split.total(), split.v()) == 0.0);
}

TEST_CASE("linear direct march from rest reproduces the stochastic layer") {
  // With the nonlinear term disabled and zero initial data the direct
  // marcher performs literally the same resolvent steps as the dedicated
  // layer solver, so the states agree bit for bit.
  Grid g(16, 12, 1.0);
  MarchParams p;
  p.nu = 0.4;
  p.dt = 1e-3;
  const BoundaryNoiseModel m = noisy_model(0.2);
  DirectSimulator direct(g, m, p, make_zero_field(g), 11, /*nonlinear=*/false);
  direct.run(25);

  WPathOptions opt;
  opt.collect_stats = false;
  const WPath wp = simulate_w(g, m, p.nu, p.dt, 25, 11, opt);
  CHECK(field_distance(g, direct.u(), wp.final) == 0.0);
}

TEST_CASE("noise-free energy residual converges at first order in dt") {
  // With w = 0 the transfer term vanishes and the ledger measures the
  // mismatch between the implicit-Euler dissipation (right endpoint plus
  // the |v_{n+1}-v_n|^2 defect) and the trapezoid quadrature.  Both are
  // O(dt) after summation, so halving dt should halve the residual.
  Grid g(32, 32, 1.0);
  const VelocityField u0 = smooth_initial(g, 0.5);
  const double T = 0.2;
  std::vector<double> dts = {4e-3, 2e-3, 1e-3};
  std::vector<double> res;
  for (double dt : dts) {
    MarchParams p;
    p.nu = 0.05;
    p.dt = dt;
    SplitSimulator s(g, quiet_model(), p, u0, 1);
    s.run(static_cast<int>(std::lround(T / dt)));
    res.push_back(std::abs(s.energy_residual()));
    // The balance itself must be tight in absolute terms.
    CHECK(std::abs(s.normalized_energy_residual()) < 1e-2);
  }
  CHECK(res[0] / res[1] == doctest::Approx(2.0).epsilon(0.3));
  CHECK(res[1] / res[2] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("energy residual stays first order with the noise on") {
  // The counter-based noise makes both runs see the same Brownian path, so
  // the residual ratio is deterministic; it need not be exactly 2 because
  // the transfer integrand inherits the rough time regularity of w.
  Grid g(32, 24, 1.0);
  const VelocityField u0 = smooth_initial(g, 0.3);
  const BoundaryNoiseModel m = noisy_model(0.1);
  const double T = 0.1;
  std::vector<double> res;
  for (double dt : {2e-3, 1e-3}) {
    MarchParams p;
    p.nu = 0.1;
    p.dt = dt;
    SplitSimulator s(g, m, p, u0, 5);
    s.run(static_cast<int>(std::lround(T / dt)));
    res.push_back(std::abs(s.energy_residual()));
    CHECK(std::abs(s.normalized_energy_residual()) < 2e-2);
  }
  CHECK(res[0] > res[1]);                // smaller step, smaller residual
  CHECK(res[0] / res[1] > 1.3);          // consistent with first order
  CHECK(res[0] / res[1] < 3.2);
}

TEST_CASE("split recombination tracks the direct march at first order") {
  Grid g(32, 24, 1.0);
  const VelocityField u0 = smooth_initial(g, 0.3);
  const BoundaryNoiseModel m = noisy_model(0.1);
  const double T = 0.05;
  std::vector<double> gaps;
  for (double dt : {2e-3, 1e-3}) {
    MarchParams p;
    p.nu = 0.1;
    p.dt = dt;
    const SplitCompareResult r = compare_split_direct(
        g, m, p, u0, static_cast<int>(std::lround(T / dt)), 5);
    gaps.push_back(r.sup_gap);
  }
  CHECK(gaps[0] < 5e-3);       // the two discretizations genuinely agree
  CHECK(gaps[0] / gaps[1] > 1.5);  // and the gap shrinks about linearly
}

TEST_CASE("scaling the w advection to zero decouples v from the noise") {
  Grid g(16, 12, 1.0);
  MarchParams p;
  p.nu = 0.2;
  p.dt = 1e-3;
  p.w_advection_scale = 0.0;
  const VelocityField u0 = smooth_initial(g, 0.4);

  SplitSimulator s1(g, noisy_model(0.3), p, u0, 1);
  SplitSimulator s2(g, noisy_model(0.3), p, u0, 999);  // different path
  s1.run(10);
  s2.run(10);
  CHECK(field_distance(g, s1.v(), s2.v()) == 0.0);  // v never sees w
  CHECK(field_distance(g, s1.w(), s2.w()) > 0.0);   // but the layers differ
  CHECK(field_distance(g, s1.total(), s1.v()) == 0.0);  // total = v + 0*w
}

TEST_CASE("a tiny blow-up threshold trips the guard") {
  Grid g(16, 12, 1.0);
  MarchParams p;
  p.dt = 1e-3;
  p.blowup_threshold = 1e-9;
  const VelocityField u0 = smooth_initial(g, 0.5);
  SplitSimulator split(g, quiet_model(), p, u0, 1);
  CHECK_THROWS_AS(split.step(), BlowUpError);
  DirectSimulator direct(g, quiet_model(), p, u0, 1);
  CHECK_THROWS_AS(direct.step(), BlowUpError);
}

TEST_CASE("picard converges instantly when the window has no noise") {
  // With w = 0 the frozen cross terms vanish, every sweep marches the same
  // self-advection problem from u0, and the second sweep reproduces the
  // first exactly: diff_2 = 0.
  Grid g(16, 12, 1.0);
  const VelocityField u0 = smooth_initial(g, 0.4);
  PicardParams p;
  p.T_bar = 0.02;
  p.dt = 2e-3;
  p.nu = 0.3;
  p.tol = 1e-12;
  const PicardReport rep = picard_iterate(g, quiet_model(), u0, p, 1);
  CHECK(rep.converged);
  CHECK(rep.halvings == 0);
  REQUIRE(rep.diffs.size() == 2);
  CHECK(rep.diffs[1] == 0.0);
}

TEST_CASE("picard contracts and its fixed point is the marched split v") {
  Grid g(32, 24, 1.0);
  const VelocityField u0 = smooth_initial(g, 0.3);
  const BoundaryNoiseModel m = noisy_model(0.1);
  PicardParams p;
  p.T_bar = 0.05;
  p.dt = 2.5e-3;
  p.nu = 0.5;
  p.tol = 1e-10;
  const uint64_t path = 7;
  const PicardReport rep = picard_iterate(g, m, u0, p, path);
  REQUIRE(rep.converged);
  CHECK(rep.halvings == 0);
  CHECK(rep.T_bar_used == doctest::Approx(0.05).epsilon(1e-12));
  for (double r : rep.ratios) CHECK(r < 1.0);
  CHECK(rep.ratios.back() < 0.7);

  // March the split scheme over the same window with the same path: the
  // Picard fixed point and the marched v solve identical discrete
  // equations, so after convergence at tol they agree to ~tol.
  MarchParams mp;
  mp.nu = p.nu;
  mp.dt = p.dt;
  mp.collect_energy = false;
  SplitSimulator split(g, m, mp, u0, path);
  const int n_steps = static_cast<int>(std::lround(p.T_bar / p.dt));
  REQUIRE(rep.v_trajectory.size() == static_cast<size_t>(n_steps) + 1);
  CHECK(field_distance(g, rep.v_trajectory.front(), u0) == 0.0);
  double worst = 0.0;
  for (int n = 1; n <= n_steps; ++n) {
    split.step();
    worst = std::max(worst,
                     field_distance(g, rep.v_trajectory[static_cast<size_t>(n)],
                                    split.v()));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("picard halves the window when the iteration stops contracting") {
  // Strong noise over a long window with little viscosity: the frozen
  // cross-term iteration diverges until the window is cut down.
  Grid g(16, 12, 1.0);
  const VelocityField u0 = smooth_initial(g, 2.0);
  BoundaryNoiseModel m = noisy_model(300.0);
  m.channels = 8;
  PicardParams p;
  p.T_bar = 0.64;
  p.dt = 5e-3;
  p.nu = 0.005;
  p.tol = 1e-9;
  p.max_iter = 30;
  p.blowup_threshold = 1e100;
  p.keep_trajectory = false;
  const PicardReport rep = picard_iterate(g, m, u0, p, 3);
  CHECK(rep.halvings >= 1);
  CHECK(rep.T_bar_used <= 0.32 + 1e-12);
  if (rep.converged) {
    REQUIRE_FALSE(rep.ratios.empty());
    CHECK(rep.ratios.back() < 1.0);
  }
}
