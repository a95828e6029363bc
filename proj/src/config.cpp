// chstokes: configuration parsing, validation, and canonical echo.
#include "chstokes/config.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace chst {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Parser {
  std::vector<std::string> errors;

  void fail(int line, const std::string& msg) {
    errors.push_back("line " + std::to_string(line) + ": " + msg);
  }

  bool to_int(const std::string& v, int& out) {
    try {
      size_t pos = 0;
      const long x = std::stol(v, &pos);
      if (pos != v.size()) return false;
      out = static_cast<int>(x);
      return x >= INT32_MIN && x <= INT32_MAX;
    } catch (...) {
      return false;
    }
  }
  bool to_u64(const std::string& v, uint64_t& out) {
    try {
      size_t pos = 0;
      out = std::stoull(v, &pos);
      return pos == v.size();
    } catch (...) {
      return false;
    }
  }
  bool to_double(const std::string& v, double& out) {
    try {
      size_t pos = 0;
      out = std::stod(v, &pos);
      return pos == v.size();
    } catch (...) {
      return false;
    }
  }
  bool to_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
    if (v == "false" || v == "0" || v == "no") { out = false; return true; }
    return false;
  }
};

}  // namespace

int RunConfig::steps() const {
  return static_cast<int>(std::llround(time.T / time.dt));
}

NoiseSchedule RunConfig::parse_schedule() const {
  NoiseSchedule s;
  std::stringstream ss(noise.schedule);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    piece = trim(piece);
    const size_t colon = piece.find(':');
    if (colon == std::string::npos)
      throw ValidationError("noise.schedule piece '" + piece +
                            "' is not of the form t:factor");
    try {
      const double t = std::stod(piece.substr(0, colon));
      const double f = std::stod(piece.substr(colon + 1));
      s.pieces.emplace_back(t, f);
    } catch (...) {
      throw ValidationError("noise.schedule piece '" + piece +
                            "' has non-numeric entries");
    }
  }
  if (s.pieces.empty())
    throw ValidationError("noise.schedule is empty");
  return s;
}

BoundaryNoiseModel RunConfig::noise_model() const {
  BoundaryNoiseModel m;
  m.channels = noise.J;
  m.sigma0 = noise.sigma0;
  m.beta = noise.beta;
  m.seed = noise.seed;
  m.dt_micro = noise.dt_micro;
  m.schedule = parse_schedule();
  return m;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  Parser p;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  std::map<std::string, int> seen;  // "section.key" -> first line

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        p.fail(lineno, "unterminated section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"grid", "time",   "physics", "ic",
                                    "noise", "output", "picard",
                                    "diagnostics"};
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* s) { return section == s; }) ==
          std::end(known))
        p.fail(lineno, "unknown section [" + section + "]");
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      p.fail(lineno, "expected key = value, got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty()) {
      p.fail(lineno, "key '" + key + "' appears before any [section]");
      continue;
    }
    const std::string path = section + "." + key;
    if (auto it = seen.find(path); it != seen.end()) {
      p.fail(lineno, "duplicate key '" + path + "' (first set on line " +
                         std::to_string(it->second) + ")");
      continue;
    }
    seen[path] = lineno;

    auto bad_value = [&](const char* type) {
      p.fail(lineno, "'" + path + "' expects " + type + ", got '" + val + "'");
    };
    bool handled = true;
    if (path == "grid.nx") { if (!p.to_int(val, c.grid.nx)) bad_value("an integer"); }
    else if (path == "grid.nz") { if (!p.to_int(val, c.grid.nz)) bad_value("an integer"); }
    else if (path == "grid.a") { if (!p.to_double(val, c.grid.a)) bad_value("a number"); }
    else if (path == "time.T") { if (!p.to_double(val, c.time.T)) bad_value("a number"); }
    else if (path == "time.dt") { if (!p.to_double(val, c.time.dt)) bad_value("a number"); }
    else if (path == "physics.nu") { if (!p.to_double(val, c.physics.nu)) bad_value("a number"); }
    else if (path == "physics.blowup_threshold") { if (!p.to_double(val, c.physics.blowup_threshold)) bad_value("a number"); }
    else if (path == "ic.preset") { c.ic.preset = val; }
    else if (path == "ic.k") { if (!p.to_int(val, c.ic.k)) bad_value("an integer"); }
    else if (path == "ic.m") { if (!p.to_int(val, c.ic.m)) bad_value("an integer"); }
    else if (path == "ic.amplitude") { if (!p.to_double(val, c.ic.amplitude)) bad_value("a number"); }
    else if (path == "noise.J") { if (!p.to_int(val, c.noise.J)) bad_value("an integer"); }
    else if (path == "noise.sigma0") { if (!p.to_double(val, c.noise.sigma0)) bad_value("a number"); }
    else if (path == "noise.beta") { if (!p.to_double(val, c.noise.beta)) bad_value("a number"); }
    else if (path == "noise.seed") { if (!p.to_u64(val, c.noise.seed)) bad_value("an unsigned integer"); }
    else if (path == "noise.dt_micro") { if (!p.to_double(val, c.noise.dt_micro)) bad_value("a number"); }
    else if (path == "noise.schedule") { c.noise.schedule = val; }
    else if (path == "output.dir") { c.output.dir = val; }
    else if (path == "output.snapshot_stride") { if (!p.to_int(val, c.output.snapshot_stride)) bad_value("an integer"); }
    else if (path == "output.write_snapshots") { if (!p.to_bool(val, c.output.write_snapshots)) bad_value("a boolean"); }
    else if (path == "picard.T_bar") { if (!p.to_double(val, c.picard.T_bar)) bad_value("a number"); }
    else if (path == "picard.tol") { if (!p.to_double(val, c.picard.tol)) bad_value("a number"); }
    else if (path == "picard.max_iter") { if (!p.to_int(val, c.picard.max_iter)) bad_value("an integer"); }
    else if (path == "diagnostics.window_lo") { if (!p.to_double(val, c.diagnostics.window_lo)) bad_value("a number"); }
    else if (path == "diagnostics.window_hi") { if (!p.to_double(val, c.diagnostics.window_hi)) bad_value("a number"); }
    else if (path == "diagnostics.t1") { if (!p.to_double(val, c.diagnostics.t1)) bad_value("a number"); }
    else if (path == "diagnostics.t2") { if (!p.to_double(val, c.diagnostics.t2)) bad_value("a number"); }
    else if (path == "diagnostics.z_star") { if (!p.to_double(val, c.diagnostics.z_star)) bad_value("a number"); }
    else if (path == "diagnostics.contrast_threshold") { if (!p.to_double(val, c.diagnostics.contrast_threshold)) bad_value("a number"); }
    else handled = false;
    if (!handled) p.fail(lineno, "unknown key '" + path + "'");
  }

  if (!p.errors.empty()) {
    std::string msg = "configuration problems:";
    for (const auto& e : p.errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const RunConfig& c) {
  std::vector<std::string> errs;
  auto need = [&errs](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  need(c.grid.nx >= 4 && c.grid.nx % 2 == 0, "grid.nx must be even and >= 4");
  need(c.grid.nz >= 4, "grid.nz must be >= 4");
  need(c.grid.a > 0.0, "grid.a must be > 0");
  need(c.time.T > 0.0, "time.T must be > 0");
  need(c.time.dt > 0.0, "time.dt must be > 0");
  if (c.time.T > 0.0 && c.time.dt > 0.0) {
    const double ratio = c.time.T / c.time.dt;
    need(std::abs(ratio - std::llround(ratio)) < 1e-9 * ratio &&
             std::llround(ratio) >= 1,
         "time.T must be a positive integer multiple of time.dt");
  }
  need(c.physics.nu > 0.0, "physics.nu must be > 0");
  need(c.physics.blowup_threshold > 0.0,
       "physics.blowup_threshold must be > 0");
  need(c.ic.preset == "zero" || c.ic.preset == "single_mode",
       "ic.preset must be 'zero' or 'single_mode'");
  if (c.ic.preset == "single_mode") {
    need(c.ic.k >= 1 && c.ic.k <= c.grid.nx / 3,
         "ic.k must lie in the dealiased range 1..nx/3");
    need(c.ic.m >= 1, "ic.m must be >= 1");
    need(std::isfinite(c.ic.amplitude), "ic.amplitude must be finite");
  }
  need(c.noise.J >= 1, "noise.J must be >= 1");
  need(c.noise.sigma0 >= 0.0, "noise.sigma0 must be >= 0");
  need(std::isfinite(c.noise.beta), "noise.beta must be finite");
  need(c.noise.dt_micro > 0.0, "noise.dt_micro must be > 0");
  if (c.noise.dt_micro > 0.0 && c.time.dt > 0.0) {
    const double ratio = c.time.dt / c.noise.dt_micro;
    need(std::abs(ratio - std::llround(ratio)) < 1e-9 * ratio &&
             std::llround(ratio) >= 1,
         "time.dt must be an integer multiple of noise.dt_micro");
  }
  need(c.noise.J / 2 <= c.grid.nx / 3,
       "noise.J uses Fourier modes beyond the dealiased range nx/3");
  need(c.output.snapshot_stride >= 0, "output.snapshot_stride must be >= 0");
  need(c.picard.T_bar > 0.0, "picard.T_bar must be > 0");
  need(c.picard.tol > 0.0, "picard.tol must be > 0");
  need(c.picard.max_iter >= 1, "picard.max_iter must be >= 1");
  need(c.diagnostics.window_lo >= 0.0 &&
           c.diagnostics.window_hi <= c.grid.a &&
           c.diagnostics.window_lo < c.diagnostics.window_hi,
       "diagnostics window must satisfy 0 <= window_lo < window_hi <= a");
  need(c.diagnostics.t1 >= 0.0 && c.diagnostics.t1 < c.diagnostics.t2,
       "diagnostics times must satisfy 0 <= t1 < t2");
  need(c.diagnostics.z_star >= 0.0 && c.diagnostics.z_star <= c.grid.a,
       "diagnostics.z_star must lie in [0, a]");
  need(c.diagnostics.contrast_threshold > 0.0,
       "diagnostics.contrast_threshold must be > 0");
  try {
    c.parse_schedule();
  } catch (const ValidationError& e) {
    errs.push_back(e.what());
  }
  if (!errs.empty()) {
    std::string msg = "configuration problems:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "nx = " << c.grid.nx << "\n";
  out << "nz = " << c.grid.nz << "\n";
  out << "a = " << fmt_double(c.grid.a) << "\n";
  out << "\n[time]\n";
  out << "T = " << fmt_double(c.time.T) << "\n";
  out << "dt = " << fmt_double(c.time.dt) << "\n";
  out << "\n[physics]\n";
  out << "nu = " << fmt_double(c.physics.nu) << "\n";
  out << "blowup_threshold = " << fmt_double(c.physics.blowup_threshold)
      << "\n";
  out << "\n[ic]\n";
  out << "preset = " << c.ic.preset << "\n";
  out << "k = " << c.ic.k << "\n";
  out << "m = " << c.ic.m << "\n";
  out << "amplitude = " << fmt_double(c.ic.amplitude) << "\n";
  out << "\n[noise]\n";
  out << "J = " << c.noise.J << "\n";
  out << "sigma0 = " << fmt_double(c.noise.sigma0) << "\n";
  out << "beta = " << fmt_double(c.noise.beta) << "\n";
  out << "seed = " << c.noise.seed << "\n";
  out << "dt_micro = " << fmt_double(c.noise.dt_micro) << "\n";
  out << "schedule = " << c.noise.schedule << "\n";
  out << "\n[output]\n";
  out << "dir = " << c.output.dir << "\n";
  out << "snapshot_stride = " << c.output.snapshot_stride << "\n";
  out << "write_snapshots = " << (c.output.write_snapshots ? "true" : "false")
      << "\n";
  out << "\n[picard]\n";
  out << "T_bar = " << fmt_double(c.picard.T_bar) << "\n";
  out << "tol = " << fmt_double(c.picard.tol) << "\n";
  out << "max_iter = " << c.picard.max_iter << "\n";
  out << "\n[diagnostics]\n";
  out << "window_lo = " << fmt_double(c.diagnostics.window_lo) << "\n";
  out << "window_hi = " << fmt_double(c.diagnostics.window_hi) << "\n";
  out << "t1 = " << fmt_double(c.diagnostics.t1) << "\n";
  out << "t2 = " << fmt_double(c.diagnostics.t2) << "\n";
  out << "z_star = " << fmt_double(c.diagnostics.z_star) << "\n";
  out << "contrast_threshold = "
      << fmt_double(c.diagnostics.contrast_threshold) << "\n";
  return out.str();
}

VelocityField make_initial_condition(const Grid& g, const RunConfig& c,
                                     const HelmholtzProjector& proj) {
  if (c.ic.preset == "zero") return make_zero_field(g);
  CHST_REQUIRE(c.ic.preset == "single_mode", "unknown ic preset");
  const VelocityField raw =
      streamfunction_mode_field(g, c.ic.k, c.ic.m, c.ic.amplitude);
  VelocityField u0 = proj.project(raw);
  u0.time = 0.0;
  return u0;
}

}  // namespace chst
