#include "fhdbc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fhdbc {

CliConfig default_cli_config() {
  CliConfig c;
  c.run.n = 128;
  c.run.model = ModelParams{0.02, 0.02, 3.0, 1e-5};
  c.run.bc = BoundaryMode::dynamic;
  c.run.init.kind = InitKind::cosine;
  c.run.init.seed = 1;
  c.run.t_final = 1e-2;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("invalid value '" + value + "' for key '" + key + "': expected " + expected);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) bad(key, v, "a finite real number");
  return out;
}

double positive(const std::string& key, const std::string& v, const std::string& what = "") {
  const double x = to_double(key, v);
  if (!(x > 0.0)) bad(key, v, "a positive number" + what);
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, v, "an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "true or false");
}

template <class T, class Fn>
std::vector<T> to_list(const std::string& key, const std::string& v, Fn&& conv) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(conv(key, trim(item)));
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void apply_setting(CliConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  RunConfig& r = c.run;
  InitialCondition& ic = r.init;
  SolverConfig& sv = r.solver;
  if (key == "N") {
    const long long n = to_int(key, v);
    if (n < 4 || n % 2 != 0 || n > 1 << 16) bad(key, v, "an even integer >= 4");
    r.n = static_cast<int>(n);
  } else if (key == "eps") {
    r.model.eps = positive(key, v);
  } else if (key == "kappa") {
    r.model.kappa = positive(key, v);
  } else if (key == "theta0") {
    r.model.theta0 = positive(key, v, " (theta0 must be strictly positive)");
  } else if (key == "dt") {
    r.model.s = positive(key, v);
  } else if (key == "t_final") {
    r.t_final = positive(key, v);
  } else if (key == "bc") {
    if (v == "dynamic")
      r.bc = BoundaryMode::dynamic;
    else if (v == "neumann")
      r.bc = BoundaryMode::neumann;
    else
      bad(key, v, "dynamic or neumann");
  } else if (key == "init") {
    try {
      ic.kind = parse_init_kind(v);
    } catch (const ConfigError&) {
      bad(key, v, "cosine, spinodal, square-droplet, two-droplets, fusion-band or custom-file");
    }
  } else if (key == "init_file") {
    ic.file = v;
  } else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) bad(key, v, "a non-negative integer");
    ic.seed = static_cast<std::uint64_t>(s);
  } else if (key == "amplitude") {
    ic.amplitude = to_double(key, v);
  } else if (key == "wavenumber") {
    const long long m = to_int(key, v);
    if (m < 0) bad(key, v, "a non-negative integer");
    ic.wavenumber = static_cast<int>(m);
  } else if (key == "mean") {
    ic.mean = to_double(key, v);
  } else if (key == "noise") {
    ic.noise = to_double(key, v);
  } else if (key == "level") {
    ic.level = to_double(key, v);
  } else if (key == "square_side") {
    ic.square_side = positive(key, v);
  } else if (key == "square_cx") {
    ic.square_cx = to_double(key, v);
  } else if (key == "square_cy") {
    ic.square_cy = to_double(key, v);
  } else if (key == "radius") {
    ic.radius = positive(key, v);
  } else if (key == "band_width") {
    ic.band_width = positive(key, v);
  } else if (key == "band_hole_radius") {
    ic.band_hole_radius = positive(key, v);
  } else if (key == "snapshot_times") {
    r.snapshot_times = to_list<double>(key, v, to_double);
  } else if (key == "output") {
    r.output_dir = v;
  } else if (key == "overwrite") {
    r.overwrite = to_bool(key, v);
  } else if (key == "newton_tol") {
    sv.newton_tol = positive(key, v);
  } else if (key == "max_newton") {
    sv.max_newton = static_cast<int>(to_int(key, v));
  } else if (key == "linear_tol") {
    sv.linear_tol = positive(key, v);
  } else if (key == "max_linear") {
    sv.max_linear = static_cast<int>(to_int(key, v));
  } else if (key == "fraction_to_boundary") {
    sv.fraction_to_boundary = to_double(key, v);
  } else if (key == "armijo_c") {
    sv.armijo_c = to_double(key, v);
  } else if (key == "backtrack_factor") {
    sv.backtrack_factor = to_double(key, v);
  } else if (key == "max_backtracks") {
    sv.max_backtracks = static_cast<int>(to_int(key, v));
  } else if (key == "grids") {
    c.grids = to_list<int>(key, v, [](const std::string& k, const std::string& x) {
      return static_cast<int>(to_int(k, x));
    });
  } else if (key == "dt_factor") {
    c.dt_factor = positive(key, v);
  } else if (key == "study_t_final") {
    c.study_t_final = positive(key, v);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void apply_config_text(CliConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      apply_setting(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(CliConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path);
}

void validate(const CliConfig& c) {
  GridParams::make(c.run.n);
  c.run.model.validate();
  c.run.solver.validate();
  step_count(c.run.t_final, c.run.model.s);
  for (double t : c.run.snapshot_times)
    if (t < 0.0 || t > c.run.t_final) throw ConfigError("snapshot_times must lie in [0, t_final]");
  if (c.run.init.kind == InitKind::custom_file && c.run.init.file.empty())
    throw ConfigError("init = custom-file requires init_file");
  for (int n : c.grids)
    if (n < 4 || n % 2 != 0) throw ConfigError("grids entries must be even integers >= 4");
}

std::string echo_config(const CliConfig& c) {
  const RunConfig& r = c.run;
  const InitialCondition& ic = r.init;
  const SolverConfig& sv = r.solver;
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto list_d = [](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
    return s;
  };
  kv("N", std::to_string(r.n));
  kv("eps", fmt(r.model.eps));
  kv("kappa", fmt(r.model.kappa));
  kv("theta0", fmt(r.model.theta0));
  kv("dt", fmt(r.model.s));
  kv("t_final", fmt(r.t_final));
  kv("bc", r.bc == BoundaryMode::dynamic ? "dynamic" : "neumann");
  kv("init", to_string(ic.kind));
  kv("init_file", ic.file);
  kv("seed", std::to_string(ic.seed));
  kv("amplitude", fmt(ic.amplitude));
  kv("wavenumber", std::to_string(ic.wavenumber));
  kv("mean", fmt(ic.mean));
  kv("noise", fmt(ic.noise));
  kv("level", fmt(ic.level));
  kv("square_side", fmt(ic.square_side));
  kv("square_cx", fmt(ic.square_cx));
  kv("square_cy", fmt(ic.square_cy));
  kv("radius", fmt(ic.radius));
  kv("band_width", fmt(ic.band_width));
  kv("band_hole_radius", fmt(ic.band_hole_radius));
  kv("snapshot_times", list_d(r.snapshot_times));
  kv("output", r.output_dir);
  kv("overwrite", r.overwrite ? "true" : "false");
  kv("newton_tol", fmt(sv.newton_tol));
  kv("max_newton", std::to_string(sv.max_newton));
  kv("linear_tol", fmt(sv.linear_tol));
  kv("max_linear", std::to_string(sv.max_linear));
  kv("fraction_to_boundary", fmt(sv.fraction_to_boundary));
  kv("armijo_c", fmt(sv.armijo_c));
  kv("backtrack_factor", fmt(sv.backtrack_factor));
  kv("max_backtracks", std::to_string(sv.max_backtracks));
  std::string grids;
  for (std::size_t i = 0; i < c.grids.size(); ++i) grids += (i ? "," : "") + std::to_string(c.grids[i]);
  kv("grids", grids);
  kv("dt_factor", fmt(c.dt_factor));
  kv("study_t_final", fmt(c.study_t_final));
  return o.str();
}

bool operator==(const CliConfig& a, const CliConfig& b) { return echo_config(a) == echo_config(b); }

}  // namespace fhdbc
