// chstokes command-line interface.
//
// Subcommands:
//   simulate   march the flow (split by default; --linear-only, --direct)
//   neumann    apply the steady boundary-to-domain map to a shear datum
//   picard     run the fixed-point iteration over one window
//   diagnose   interior-regularity and energy-balance measurements
//   converge   self-convergence sweeps along one axis (dt | nz | nx | J)
//   ensemble   Monte Carlo over noise paths (CHST_THREADS caps workers)
//
// Every run writes into the output directory: the exact configuration used
// (config_used.cfg), and provenance.csv with the code version, a hash of
// that configuration, and the seed.  All outputs are deterministic
// functions of (config, seed, path): rerunning a command reproduces every
// byte.  Exit codes: 0 success, 2 invalid configuration or arguments,
// 3 numerical blow-up.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "chstokes/config.h"
#include "chstokes/diagnostics.h"
#include "chstokes/linear_sde.h"
#include "chstokes/nonlinear.h"
#include "chstokes/snapshot_io.h"
#include "chstokes/version.h"

namespace fs = std::filesystem;
using namespace chst;

namespace {

// ---------------------------------------------------------------------------
// Provenance
// ---------------------------------------------------------------------------

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// Creates the output directory and drops the reproducibility records.
fs::path prepare_output(const RunConfig& c, const std::string& command) {
  const fs::path dir(c.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw ValidationError("cannot create output directory '" + c.output.dir +
                          "': " + ec.message());
  const std::string echoed = echo_config(c);
  {
    std::ofstream out(dir / "config_used.cfg", std::ios::binary);
    if (!out)
      throw ValidationError("cannot write into output directory '" +
                            c.output.dir + "'");
    out << echoed;
  }
  CsvWriter prov((dir / "provenance.csv").string());
  prov.row({"version", "config_hash", "seed", "command"});
  prov.row({kVersionString, hex64(fnv1a64(echoed)),
            std::to_string(c.noise.seed), command});
  return dir;
}

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "state_%06d.chst", step);
  return buf;
}

// ---------------------------------------------------------------------------
// Config loading with command-line overrides
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string config_path;
  int nx = 0, nz = 0, J = 0, stride = 0;
  double a = 0, T = 0, dt = 0, nu = 0, sigma0 = 0, beta0 = 0, amplitude = 0;
  uint64_t seed = 0;
  std::string out_dir, ic_preset, schedule;
  int ic_k = 0, ic_m = 0;
  bool snapshots = false;

  CLI::Option *o_nx = nullptr, *o_nz = nullptr, *o_a = nullptr, *o_T = nullptr,
              *o_dt = nullptr, *o_nu = nullptr, *o_J = nullptr,
              *o_sigma0 = nullptr, *o_beta = nullptr, *o_seed = nullptr,
              *o_out = nullptr, *o_stride = nullptr, *o_preset = nullptr,
              *o_k = nullptr, *o_m = nullptr, *o_amp = nullptr,
              *o_sched = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file");
    o_nx = cmd->add_option("--nx", nx, "override grid.nx");
    o_nz = cmd->add_option("--nz", nz, "override grid.nz");
    o_a = cmd->add_option("--a", a, "override grid.a");
    o_T = cmd->add_option("--T", T, "override time.T");
    o_dt = cmd->add_option("--dt", dt, "override time.dt");
    o_nu = cmd->add_option("--nu", nu, "override physics.nu");
    o_J = cmd->add_option("--J", J, "override noise.J");
    o_sigma0 = cmd->add_option("--sigma0", sigma0, "override noise.sigma0");
    o_beta = cmd->add_option("--beta", beta0, "override noise.beta");
    o_seed = cmd->add_option("--seed", seed, "override noise.seed");
    o_sched = cmd->add_option("--schedule", schedule,
                              "override noise.schedule (t0:f0,t1:f1,...)");
    o_out = cmd->add_option("--out", out_dir, "override output.dir");
    o_stride =
        cmd->add_option("--stride", stride, "override output.snapshot_stride");
    cmd->add_flag("--snapshots", snapshots,
                  "write numbered state snapshots every stride steps");
    o_preset = cmd->add_option("--ic-preset", ic_preset,
                               "override ic.preset (zero | single_mode)");
    o_k = cmd->add_option("--ic-k", ic_k, "override ic.k");
    o_m = cmd->add_option("--ic-m", ic_m, "override ic.m");
    o_amp = cmd->add_option("--ic-amplitude", amplitude,
                            "override ic.amplitude");
  }

  RunConfig load() const {
    RunConfig c =
        config_path.empty() ? RunConfig{} : load_config_file(config_path);
    if (o_nx->count()) c.grid.nx = nx;
    if (o_nz->count()) c.grid.nz = nz;
    if (o_a->count()) c.grid.a = a;
    if (o_T->count()) c.time.T = T;
    if (o_dt->count()) c.time.dt = dt;
    if (o_nu->count()) c.physics.nu = nu;
    if (o_J->count()) c.noise.J = J;
    if (o_sigma0->count()) c.noise.sigma0 = sigma0;
    if (o_beta->count()) c.noise.beta = beta0;
    if (o_seed->count()) c.noise.seed = seed;
    if (o_sched->count()) c.noise.schedule = schedule;
    if (o_out->count()) c.output.dir = out_dir;
    if (o_stride->count()) c.output.snapshot_stride = stride;
    if (snapshots) c.output.write_snapshots = true;
    if (o_preset->count()) c.ic.preset = ic_preset;
    if (o_k->count()) c.ic.k = ic_k;
    if (o_m->count()) c.ic.m = ic_m;
    if (o_amp->count()) c.ic.amplitude = amplitude;
    validate_config(c);
    return c;
  }
};

MarchParams march_params(const RunConfig& c) {
  MarchParams p;
  p.nu = c.physics.nu;
  p.dt = c.time.dt;
  p.blowup_threshold = c.physics.blowup_threshold;
  return p;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& c, bool linear_only, bool direct,
                 uint64_t path) {
  if (linear_only && direct)
    throw ValidationError("--linear-only and --direct are mutually exclusive");
  const fs::path dir = prepare_output(
      c, linear_only ? "simulate --linear-only"
                     : (direct ? "simulate --direct" : "simulate"));
  Grid g(c.grid.nx, c.grid.nz, c.grid.a);
  const BoundaryNoiseModel model = c.noise_model();
  const int n_steps = c.steps();
  const int stride = c.output.snapshot_stride;
  const bool snaps = c.output.write_snapshots;
  CsvWriter series((dir / "series.csv").string());

  auto maybe_snapshot = [&](int step, const VelocityField& f) {
    if (snaps && stride > 0 && step % stride == 0)
      write_velocity_snapshot((dir / snapshot_name(step)).string(), g, f);
  };

  if (linear_only) {
    series.row({"t", "norm_w"});
    WPathOptions opt;
    opt.collect_stats = true;
    series.row({CsvWriter::num(0.0), CsvWriter::num(0.0)});
    const WPath wp = simulate_w(g, model, c.physics.nu, c.time.dt, n_steps,
                                path, opt, [&](const VelocityField& w, int n) {
                                  series.row({CsvWriter::num(n * c.time.dt),
                                              CsvWriter::num(norm_l2(g, w))});
                                  maybe_snapshot(n, w);
                                });
    write_velocity_snapshot((dir / "final.chst").string(), g, wp.final);
    CsvWriter stats((dir / "stats.csv").string());
    stats.row({"sup_norm_w", "l4l4_w"});
    stats.row({CsvWriter::num(wp.stats.sup_l2), CsvWriter::num(wp.stats.l4l4())});
    return 0;
  }

  const HelmholtzProjector proj(g);
  const VelocityField u0 = make_initial_condition(g, c, proj);

  if (direct) {
    DirectSimulator sim(g, model, march_params(c), u0, path);
    series.row({"t", "norm_u"});
    series.row({CsvWriter::num(0.0), CsvWriter::num(norm_l2(g, u0))});
    maybe_snapshot(0, u0);
    for (int n = 1; n <= n_steps; ++n) {
      sim.step();
      series.row({CsvWriter::num(n * c.time.dt),
                  CsvWriter::num(norm_l2(g, sim.u()))});
      maybe_snapshot(n, sim.u());
    }
    write_velocity_snapshot((dir / "final.chst").string(), g, sim.u());
    return 0;
  }

  SplitSimulator sim(g, model, march_params(c), u0, path);
  series.row({"t", "norm_v", "norm_w", "norm_total", "energy_residual",
              "normalized_energy_residual"});
  series.row({CsvWriter::num(0.0), CsvWriter::num(norm_l2(g, u0)),
              CsvWriter::num(0.0), CsvWriter::num(norm_l2(g, u0)),
              CsvWriter::num(0.0), CsvWriter::num(0.0)});
  maybe_snapshot(0, u0);
  for (int n = 1; n <= n_steps; ++n) {
    sim.step();
    const VelocityField total = sim.total();
    series.row({CsvWriter::num(n * c.time.dt),
                CsvWriter::num(norm_l2(g, sim.v())),
                CsvWriter::num(norm_l2(g, sim.w())),
                CsvWriter::num(norm_l2(g, total)),
                CsvWriter::num(sim.energy_residual()),
                CsvWriter::num(sim.normalized_energy_residual())});
    maybe_snapshot(n, total);
  }
  write_velocity_snapshot((dir / "final.chst").string(), g, sim.total());
  write_velocity_snapshot((dir / "final_v.chst").string(), g, sim.v());
  write_velocity_snapshot((dir / "final_w.chst").string(), g, sim.w());
  return 0;
}

// ---------------------------------------------------------------------------
// neumann
// ---------------------------------------------------------------------------

BoundaryField parse_datum_preset(const Grid& g, const std::string& preset) {
  BoundaryField b(g.nx());
  const size_t c1 = preset.find(':');
  const std::string kind = preset.substr(0, c1);
  try {
    if (kind == "constant" && c1 != std::string::npos) {
      b.coef[0] = std::stod(preset.substr(c1 + 1));
      return b;
    }
    if (kind == "mode" && c1 != std::string::npos) {
      const size_t c2 = preset.find(':', c1 + 1);
      if (c2 == std::string::npos)
        throw ValidationError("--preset mode wants mode:k:amplitude");
      const int k = std::stoi(preset.substr(c1 + 1, c2 - c1 - 1));
      const double amp = std::stod(preset.substr(c2 + 1));
      if (k < 1 || k > g.nx() / 3)
        throw ValidationError("--preset mode index must lie in 1..nx/3");
      // amp * cos(k x)
      b.coef[k] = cplx(0.5 * amp, 0.0);
      b.coef[g.nx() - k] = cplx(0.5 * amp, 0.0);
      return b;
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw ValidationError("unknown datum preset '" + preset +
                        "' (want constant:VALUE or mode:K:AMPLITUDE)");
}

int cmd_neumann(const RunConfig& c, const std::string& preset,
                const std::string& datum_file) {
  if (preset.empty() == datum_file.empty())
    throw ValidationError("neumann wants exactly one of --preset, --datum");
  const fs::path dir = prepare_output(c, "neumann");
  Grid g(c.grid.nx, c.grid.nz, c.grid.a);
  const BoundaryField datum = preset.empty()
                                  ? read_boundary_snapshot(datum_file, g)
                                  : parse_datum_preset(g, preset);
  const VelocityField u = neumann_map(g, datum, c.physics.nu);

  write_boundary_snapshot((dir / "datum.chst").string(), g, datum, 0.0);
  write_velocity_snapshot((dir / "solution.chst").string(), g, u);

  // Horizontal-mean profile u1(z) (the k = 0 column) and solution norms.
  CsvWriter prof((dir / "profile.csv").string());
  prof.row({"z", "u1_mean"});
  for (int j = 0; j < g.nz(); ++j)
    prof.row({CsvWriter::num(g.z_center(j)),
              CsvWriter::num(u.u1.at(0, j).real())});
  CsvWriter norms((dir / "norms.csv").string());
  norms.row({"norm_l2", "norm_h1", "grad_sq"});
  norms.row({CsvWriter::num(norm_l2(g, u)), CsvWriter::num(norm_h1(g, u)),
             CsvWriter::num(grad_sq(g, u))});
  return 0;
}

// ---------------------------------------------------------------------------
// picard
// ---------------------------------------------------------------------------

int cmd_picard(const RunConfig& c, uint64_t path) {
  const fs::path dir = prepare_output(c, "picard");
  Grid g(c.grid.nx, c.grid.nz, c.grid.a);
  const HelmholtzProjector proj(g);
  const VelocityField u0 = make_initial_condition(g, c, proj);
  PicardParams p;
  p.T_bar = c.picard.T_bar;
  p.dt = c.time.dt;
  p.tol = c.picard.tol;
  p.max_iter = c.picard.max_iter;
  p.nu = c.physics.nu;
  p.blowup_threshold = c.physics.blowup_threshold;
  p.keep_trajectory = false;
  const PicardReport rep = picard_iterate(g, c.noise_model(), u0, p, path);

  CsvWriter iters((dir / "picard.csv").string());
  iters.row({"iteration", "diff", "ratio"});
  for (size_t i = 0; i < rep.diffs.size(); ++i)
    iters.row({CsvWriter::num(static_cast<int>(i + 1)),
               CsvWriter::num(rep.diffs[i]),
               i == 0 ? "" : CsvWriter::num(rep.ratios[i - 1])});
  CsvWriter summary((dir / "picard_summary.csv").string());
  summary.row({"converged", "halvings", "T_bar_used", "iterations",
               "final_norm"});
  summary.row({rep.converged ? "true" : "false",
               CsvWriter::num(rep.halvings), CsvWriter::num(rep.T_bar_used),
               CsvWriter::num(static_cast<int>(rep.diffs.size())),
               CsvWriter::num(rep.converged ? norm_l2(g, rep.v_final) : 0.0)});
  if (rep.converged)
    write_velocity_snapshot((dir / "fixed_point.chst").string(), g,
                            rep.v_final);
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

int cmd_diagnose(const RunConfig& c, uint64_t path) {
  const fs::path dir = prepare_output(c, "diagnose");
  Grid g(c.grid.nx, c.grid.nz, c.grid.a);
  const BoundaryNoiseModel model = c.noise_model();
  WindowSpec win;
  win.z_lo = c.diagnostics.window_lo;
  win.z_hi = c.diagnostics.window_hi;
  win.t1 = c.diagnostics.t1;
  win.t2 = c.diagnostics.t2;
  const int heat_steps =
      std::max(1, static_cast<int>(std::llround(win.t2 / c.time.dt)));

  CsvWriter rep((dir / "diagnostics.csv").string());
  rep.row({"metric", "value", "nx", "nz", "dt", "verdict"});
  auto row = [&](const std::string& name, double value, int nz,
                 const std::string& verdict) {
    rep.row({name, CsvWriter::num(value), CsvWriter::num(c.grid.nx),
             CsvWriter::num(nz), CsvWriter::num(c.time.dt), verdict});
  };

  // 1. Matched-stencil heat residual: a scheme identity, so round-off.
  const HeatResidualReport matched = interior_heat_residual(
      g, model, c.physics.nu, c.time.dt, heat_steps, win, path, true);
  const double rel_matched =
      matched.mean_scale > 0.0 ? matched.mean_residual / matched.mean_scale
                               : 0.0;
  row("heat_residual_matched_rel", rel_matched, c.grid.nz,
      rel_matched < 1e-9 ? "pass" : "fail");

  // 2. Independent-stencil residual under z-refinement: truncation order.
  Grid g2(c.grid.nx, 2 * c.grid.nz, c.grid.a);
  const HeatResidualReport coarse = interior_heat_residual(
      g, model, c.physics.nu, c.time.dt, heat_steps, win, path, false);
  const HeatResidualReport fine = interior_heat_residual(
      g2, model, c.physics.nu, c.time.dt, heat_steps, win, path, false);
  row("heat_residual_coarse", coarse.mean_residual, c.grid.nz, "info");
  row("heat_residual_fine", fine.mean_residual, 2 * c.grid.nz, "info");
  const double order =
      std::log2(coarse.mean_residual / std::max(fine.mean_residual, 1e-300));
  row("heat_residual_order", order, c.grid.nz, order >= 1.0 ? "pass" : "fail");

  // 3. Spectral contrast of the layer vorticity above |k| = nx/4.
  const ContrastReport contrast =
      window_contrast_study(g, model, c.physics.nu, c.time.dt, c.steps(),
                            c.diagnostics.t1, c.grid.nx / 4, path);
  if (contrast.n_snapshots > 0)
    row("spectral_contrast_max", contrast.max_contrast, c.grid.nz,
        contrast.max_contrast < c.diagnostics.contrast_threshold ? "pass"
                                                                 : "fail");
  else
    row("spectral_contrast_max", 0.0, c.grid.nz,
        "undefined (no noise energy above nx/4)");

  // 4. Vorticity transport residual of the full flow.
  {
    const HelmholtzProjector proj(g);
    const VelocityField u0 = make_initial_condition(g, c, proj);
    const TransportReport tr = transport_residual(
        g, model, march_params(c), u0, heat_steps, win, path);
    row("transport_residual", tr.mean_residual, c.grid.nz, "info");
  }

  // 5. Energy-balance residual at dt and dt/2.
  {
    const HelmholtzProjector proj(g);
    const VelocityField u0 = make_initial_condition(g, c, proj);
    double res[2];
    for (int i = 0; i < 2; ++i) {
      MarchParams p = march_params(c);
      p.dt = c.time.dt / (i + 1);
      SplitSimulator sim(g, model, p, u0, path);
      sim.run(c.steps() * (i + 1));
      res[i] = std::abs(sim.energy_residual());
    }
    row("energy_residual", res[0], c.grid.nz, "info");
    const double rate = std::log2(res[0] / std::max(res[1], 1e-300));
    row("energy_residual_rate", rate, c.grid.nz,
        (rate >= 0.8 && rate <= 1.2) ? "pass" : "fail");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

int cmd_converge(const RunConfig& c, const std::string& axis, int levels,
                 uint64_t path) {
  if (levels < 3)
    throw ValidationError("converge wants at least 3 levels");
  const fs::path dir = prepare_output(c, "converge --axis " + axis);
  CsvWriter out((dir / "converge.csv").string());
  out.row({"axis", "level", "value", "gap", "rate"});

  // Gaps between successive levels of a scalar- or field-valued observable;
  // rate_i = log2(gap_i / gap_{i+1}).
  auto emit = [&](const std::vector<double>& knob,
                  const std::vector<double>& gaps) {
    for (size_t i = 0; i < gaps.size(); ++i) {
      const bool has_rate = i + 1 < gaps.size() && gaps[i + 1] > 0.0;
      out.row({axis, CsvWriter::num(static_cast<int>(i)),
               CsvWriter::num(knob[i]), CsvWriter::num(gaps[i]),
               has_rate ? CsvWriter::num(std::log2(gaps[i] / gaps[i + 1]))
                        : ""});
    }
  };

  if (axis == "dt") {
    Grid g(c.grid.nx, c.grid.nz, c.grid.a);
    const HelmholtzProjector proj(g);
    const VelocityField u0 = make_initial_condition(g, c, proj);
    const BoundaryNoiseModel model = c.noise_model();
    std::vector<VelocityField> finals;
    std::vector<double> knob;
    for (int lev = 0; lev < levels; ++lev) {
      MarchParams p = march_params(c);
      p.dt = c.time.dt / (1 << lev);
      p.collect_energy = false;
      SplitSimulator sim(g, model, p, u0, path);
      sim.run(c.steps() * (1 << lev));
      finals.push_back(sim.total());
      knob.push_back(p.dt);
    }
    std::vector<double> gaps;
    for (int lev = 0; lev + 1 < levels; ++lev)
      gaps.push_back(norm_l2(
          g, field_lincomb(1.0, finals[lev], -1.0, finals[lev + 1])));
    emit(knob, gaps);
    return 0;
  }

  if (axis == "nz") {
    // Boundary-map solution for the configured mode; successive grids share
    // node rows (even indices), so the vertical velocity compares directly.
    const int k = std::max(1, c.ic.k);
    std::vector<std::unique_ptr<Grid>> grids;
    std::vector<VelocityField> sols;
    std::vector<double> knob;
    for (int lev = 0; lev < levels; ++lev) {
      grids.push_back(std::make_unique<Grid>(c.grid.nx, c.grid.nz * (1 << lev),
                                             c.grid.a));
      BoundaryField b(c.grid.nx);
      b.coef[k] = cplx(0.5, 0.0);
      b.coef[c.grid.nx - k] = cplx(0.5, 0.0);
      sols.push_back(neumann_map(*grids.back(), b, c.physics.nu));
      knob.push_back(grids.back()->dz());
    }
    std::vector<double> gaps;
    for (int lev = 0; lev + 1 < levels; ++lev) {
      double worst = 0.0;
      const Grid& gc = *grids[lev];
      for (int j = 0; j <= gc.nz(); ++j)
        worst = std::max(worst, std::abs(sols[lev].u2.at(k, j) -
                                         sols[lev + 1].u2.at(k, 2 * j)));
      gaps.push_back(worst);
    }
    emit(knob, gaps);
    return 0;
  }

  if (axis == "nx") {
    // Horizontal refinement of the nonlinear run; the observable is the
    // final energy (spectral convergence shows up as fast gap decay).
    const BoundaryNoiseModel model = c.noise_model();
    std::vector<double> energy, knob;
    for (int lev = 0; lev < levels; ++lev) {
      Grid g(c.grid.nx * (1 << lev), c.grid.nz, c.grid.a);
      const HelmholtzProjector proj(g);
      const VelocityField u0 = make_initial_condition(g, c, proj);
      MarchParams p = march_params(c);
      p.collect_energy = false;
      SplitSimulator sim(g, model, p, u0, path);
      sim.run(c.steps());
      energy.push_back(norm_l2_sq(g, sim.total()));
      knob.push_back(static_cast<double>(g.nx()));
    }
    std::vector<double> gaps;
    for (int lev = 0; lev + 1 < levels; ++lev)
      gaps.push_back(std::abs(energy[lev] - energy[lev + 1]));
    emit(knob, gaps);
    return 0;
  }

  if (axis == "J") {
    // Noise-truncation study: same seed, more channels; sup-L2 of the layer
    // stabilizes as the extra channels' weights decay.
    Grid g(c.grid.nx, c.grid.nz, c.grid.a);
    std::vector<double> sup, knob;
    for (int lev = 0; lev < levels; ++lev) {
      BoundaryNoiseModel model = c.noise_model();
      model.channels = c.noise.J * (1 << lev);
      model.validate(g.nx());  // may reject channels beyond the cutoff
      const WPath wp =
          simulate_w(g, model, c.physics.nu, c.time.dt, c.steps(), path);
      sup.push_back(wp.stats.sup_l2);
      knob.push_back(static_cast<double>(model.channels));
    }
    std::vector<double> gaps;
    for (int lev = 0; lev + 1 < levels; ++lev)
      gaps.push_back(std::abs(sup[lev] - sup[lev + 1]));
    emit(knob, gaps);
    return 0;
  }

  throw ValidationError("unknown converge axis '" + axis +
                        "' (want dt, nz, nx, or J)");
}

// ---------------------------------------------------------------------------
// ensemble
// ---------------------------------------------------------------------------

struct PathResult {
  double w_sq = 0.0;      // ||w(T)||_L2^2
  double u_sq = 0.0;      // ||u(T)||_L2^2
  double l4l4 = 0.0;      // integral of ||u(t)||_L4^4 dt (left endpoints)
  double w1_k0 = 0.0;     // Re w1(k=0, z*) at T, the OU-oracle observable
};

int ensemble_workers(int n_paths) {
  int want = 1;
  if (const char* env = std::getenv("CHST_THREADS")) {
    try {
      want = std::max(1, std::stoi(env));
    } catch (...) {
      throw ValidationError("CHST_THREADS must be a positive integer");
    }
  }
  return std::min(want, n_paths);
}

int cmd_ensemble(const RunConfig& c, int n_paths) {
  if (n_paths < 2) throw ValidationError("ensemble wants at least 2 paths");
  const fs::path dir = prepare_output(c, "ensemble");
  const BoundaryNoiseModel model = c.noise_model();
  const int n_steps = c.steps();
  const int j_star = center_index_near(Grid(c.grid.nx, c.grid.nz, c.grid.a),
                                       c.diagnostics.z_star);

  // Workers own their grids (FFT scratch is per-grid); results land in a
  // path-indexed vector so the reduction order never depends on timing.
  std::vector<PathResult> results(n_paths);
  std::atomic<int> next{0};
  auto worker = [&]() {
    Grid g(c.grid.nx, c.grid.nz, c.grid.a);
    const HelmholtzProjector proj(g);
    const VelocityField u0 = make_initial_condition(g, c, proj);
    MarchParams p = march_params(c);
    p.collect_energy = false;
    for (int path = next.fetch_add(1); path < n_paths;
         path = next.fetch_add(1)) {
      SplitSimulator sim(g, model, p, u0, static_cast<uint64_t>(path));
      PathResult r;
      for (int n = 0; n < n_steps; ++n) {
        const double l4 = norm_l4(g, sim.total());
        r.l4l4 += c.time.dt * l4 * l4 * l4 * l4;
        sim.step();
      }
      r.w_sq = norm_l2_sq(g, sim.w());
      r.u_sq = norm_l2_sq(g, sim.total());
      r.w1_k0 = sim.w().u1.at(0, j_star).real();
      results[static_cast<size_t>(path)] = r;
    }
  };
  const int n_workers = ensemble_workers(n_paths);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  CsvWriter rows((dir / "ensemble.csv").string());
  rows.row({"path", "w_sq", "u_sq", "l4l4_u", "w1_k0_at_z_star"});
  for (int i = 0; i < n_paths; ++i)
    rows.row({CsvWriter::num(i), CsvWriter::num(results[i].w_sq),
              CsvWriter::num(results[i].u_sq), CsvWriter::num(results[i].l4l4),
              CsvWriter::num(results[i].w1_k0)});

  auto mean_var = [&](auto getter) {
    double mean = 0.0;
    for (const auto& r : results) mean += getter(r);
    mean /= n_paths;
    double var = 0.0;
    for (const auto& r : results) {
      const double d = getter(r) - mean;
      var += d * d;
    }
    var /= (n_paths - 1);
    return std::pair<double, double>(mean, var);
  };
  const auto [w_mean, w_var] = mean_var([](const PathResult& r) { return r.w_sq; });
  const auto [u_mean, u_var] = mean_var([](const PathResult& r) { return r.u_sq; });
  const auto [l4_mean, l4_var] = mean_var([](const PathResult& r) { return r.l4l4; });
  const auto [k0_mean, k0_var] =
      mean_var([](const PathResult& r) { return r.w1_k0; });

  // Independent covariance recursion for the k=0 slice (the constant noise
  // channel): predicted variance of w1(T, z*).
  const double oracle = ou_mode0_variance(c.grid.nz, c.grid.a, c.physics.nu,
                                          model, c.time.dt, n_steps,
                                          c.diagnostics.z_star);
  const double se = oracle * std::sqrt(2.0 / std::max(1, n_paths - 1));

  CsvWriter summary((dir / "ensemble_summary.csv").string());
  summary.row({"n_paths", "mean_w_sq", "var_w_sq", "mean_u_sq", "var_u_sq",
               "mean_l4l4_u", "var_l4l4_u", "ou_mc_mean", "ou_mc_var",
               "ou_oracle_var", "ou_se", "ou_within_3se"});
  summary.row({CsvWriter::num(n_paths), CsvWriter::num(w_mean),
               CsvWriter::num(w_var), CsvWriter::num(u_mean),
               CsvWriter::num(u_var), CsvWriter::num(l4_mean),
               CsvWriter::num(l4_var), CsvWriter::num(k0_mean),
               CsvWriter::num(k0_var), CsvWriter::num(oracle),
               CsvWriter::num(se),
               std::abs(k0_var - oracle) <= 3.0 * se ? "true" : "false"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-driven channel flow: simulation and verification"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1);

  CommonOpts sim_opts, neu_opts, pic_opts, diag_opts, conv_opts, ens_opts;

  CLI::App* sim = app.add_subcommand("simulate", "march the flow");
  sim_opts.attach(sim);
  bool linear_only = false, direct = false;
  uint64_t sim_path = 1;
  sim->add_flag("--linear-only", linear_only,
                "march only the boundary-driven linear layer");
  sim->add_flag("--direct", direct, "march the unsplit equation");
  sim->add_option("--path", sim_path, "noise path index");

  CLI::App* neu = app.add_subcommand("neumann",
                                     "steady boundary-to-domain map");
  neu_opts.attach(neu);
  std::string neu_preset, neu_datum;
  neu->add_option("--preset", neu_preset,
                  "datum preset: constant:VALUE or mode:K:AMPLITUDE");
  neu->add_option("--datum", neu_datum, "boundary snapshot file with the datum");

  CLI::App* pic = app.add_subcommand("picard", "fixed-point window iteration");
  pic_opts.attach(pic);
  uint64_t pic_path = 1;
  pic->add_option("--path", pic_path, "noise path index");

  CLI::App* diag = app.add_subcommand("diagnose",
                                      "interior regularity and energy checks");
  diag_opts.attach(diag);
  uint64_t diag_path = 1;
  diag->add_option("--path", diag_path, "noise path index");

  CLI::App* conv = app.add_subcommand("converge", "self-convergence sweep");
  conv_opts.attach(conv);
  std::string axis = "dt";
  int levels = 3;
  uint64_t conv_path = 1;
  conv->add_option("--axis", axis, "sweep axis: dt | nz | nx | J");
  conv->add_option("--levels", levels, "number of refinement levels (>= 3)");
  conv->add_option("--path", conv_path, "noise path index");

  CLI::App* ens = app.add_subcommand("ensemble", "Monte Carlo over paths");
  ens_opts.attach(ens);
  int n_paths = 8;
  ens->add_option("--paths", n_paths, "number of noise paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments are validation failures
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_opts.load(), linear_only, direct, sim_path);
    if (neu->parsed()) return cmd_neumann(neu_opts.load(), neu_preset, neu_datum);
    if (pic->parsed()) return cmd_picard(pic_opts.load(), pic_path);
    if (diag->parsed()) return cmd_diagnose(diag_opts.load(), diag_path);
    if (conv->parsed())
      return cmd_converge(conv_opts.load(), axis, levels, conv_path);
    if (ens->parsed()) return cmd_ensemble(ens_opts.load(), n_paths);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
