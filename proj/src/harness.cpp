#include "fhdbc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace fhdbc {

namespace fs = std::filesystem;

const char* to_string(InitKind k) {
  switch (k) {
    case InitKind::cosine: return "cosine";
    case InitKind::spinodal: return "spinodal";
    case InitKind::square_droplet: return "square-droplet";
    case InitKind::two_droplets: return "two-droplets";
    case InitKind::fusion_band: return "fusion-band";
    case InitKind::custom_file: return "custom-file";
  }
  return "?";
}

InitKind parse_init_kind(const std::string& s) {
  for (InitKind k : {InitKind::cosine, InitKind::spinodal, InitKind::square_droplet, InitKind::two_droplets,
                     InitKind::fusion_band, InitKind::custom_file}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown init '" + s +
                    "' (expected cosine, spinodal, square-droplet, two-droplets, fusion-band, custom-file)");
}

namespace {

double periodic_dx(double x, double cx) {
  double d = std::abs(x - cx);
  return std::min(d, 1.0 - d);
}

/// Positive inside the square, negative outside. A side that reaches the
/// wall y = 0 is not treated as an interface.
double square_distance(const InitialCondition& ic, double x, double y) {
  const double half = 0.5 * ic.square_side;
  const double dx = half - periodic_dx(x, ic.square_cx);
  const double lo = ic.square_cy - half;
  const double hi = ic.square_cy + half;
  const double dy = lo <= 0.0 ? hi - y : std::min(y - lo, hi - y);
  if (dx >= 0.0 && dy >= 0.0) return std::min(dx, dy);
  const double ox = std::max(-dx, 0.0);
  const double oy = std::max(-dy, 0.0);
  return -std::hypot(ox, oy);
}

double circle_distance(double x, double y, double cx, double cy, double r) {
  return r - std::hypot(periodic_dx(x, cx), y - cy);
}

double uniform_pm1(std::mt19937_64& gen) {
  const std::uint64_t bits = gen() >> 11;
  return 2.0 * (static_cast<double>(bits) * 0x1.0p-53) - 1.0;
}

}  // namespace

BulkField make_initial(const InitialCondition& ic, int n) {
  const GridParams g = GridParams::make(n);
  const double two_pi = 2.0 * std::numbers::pi;
  BulkField phi(n);
  auto profile = [&](double d) { return ic.level * std::tanh(d / g.h); };

  switch (ic.kind) {
    case InitKind::cosine:
      phi = sample(n, [&](double x, double y) {
        return ic.amplitude * std::cos(two_pi * ic.wavenumber * x) * std::cos(two_pi * ic.wavenumber * y);
      });
      break;
    case InitKind::spinodal: {
      std::mt19937_64 gen(ic.seed);
      phi = BulkField(n, ic.mean);
      for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i) phi(i, j) = ic.mean + ic.noise * uniform_pm1(gen);
      break;
    }
    case InitKind::square_droplet:
      phi = sample(n, [&](double x, double y) { return profile(square_distance(ic, x, y)); });
      break;
    case InitKind::two_droplets:
      phi = sample(n, [&](double x, double y) {
        const double a = circle_distance(x, y, 0.5 - ic.radius, 0.0, ic.radius);
        const double b = circle_distance(x, y, 0.5 + ic.radius, 0.0, ic.radius);
        return profile(std::max(a, b));
      });
      break;
    case InitKind::fusion_band:
      phi = sample(n, [&](double x, double y) {
        const double band = ic.band_width - y;
        const double hole = circle_distance(x, y, 0.5, 0.0, ic.band_hole_radius);
        return profile(std::min(band, -hole));
      });
      break;
    case InitKind::custom_file:
      phi = read_snapshot(ic.file);
      if (phi.n() != n) {
        std::ostringstream msg;
        msg << "custom initial file " << ic.file << " has N = " << phi.n() << ", run uses N = " << n;
        throw ConfigError(msg.str());
      }
      break;
  }
  if (!(phi.max_abs() <= 1.0 - 1e-6)) {
    std::ostringstream msg;
    msg << "initial condition is not admissible: max |phi| = " << phi.max_abs() << " exceeds 1 - 1e-6";
    throw ConfigError(msg.str());
  }
  return phi;
}

int step_count(double t, double s) {
  if (!(t > 0.0) || !(s > 0.0)) throw ConfigError("t_final and dt must be positive");
  const double ratio = t / s;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * k) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t_final = " << t << " is not an integer multiple of dt = " << s;
    throw ConfigError(msg.str());
  }
  if (k > std::numeric_limits<int>::max()) throw ConfigError("too many time steps");
  return static_cast<int>(k);
}

void write_snapshot(const std::string& path, const BulkField& phi, double t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write snapshot " + path);
  const int n = phi.n();
  out << std::setprecision(17) << "N " << n << " h " << phi.h() << " t " << t << '\n';
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) out << (i ? " " : "") << phi(i, j);
    out << '\n';
  }
  if (!out) throw IoError("failed writing snapshot " + path);
}

void write_boundary_row(const std::string& path, const BoundaryField& row) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write boundary file " + path);
  out << std::setprecision(17);
  for (int i = 0; i < row.n(); ++i) out << (i ? " " : "") << row[i];
  out << '\n';
  if (!out) throw IoError("failed writing boundary file " + path);
}

BulkField read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read snapshot " + path);
  std::string tag_n, tag_h, tag_t;
  int n = 0;
  double h = 0.0, t = 0.0;
  if (!(in >> tag_n >> n >> tag_h >> h >> tag_t >> t) || tag_n != "N" || tag_h != "h" || tag_t != "t")
    throw IoError("malformed snapshot header in " + path);
  BulkField phi(GridParams::make(n).n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i)
      if (!(in >> phi(i, j))) throw IoError("snapshot " + path + " is truncated");
  return phi;
}

namespace {

std::string time_tag(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", t);
  return buf;
}

void prepare_output(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + cfg.output_dir);
  const fs::path series = dir / "series.csv";
  if (!cfg.overwrite && fs::exists(series))
    throw IoError(series.string() + " already exists (pass overwrite to replace it)");
}

}  // namespace

RunSummary run_simulation(const RunConfig& cfg, const StepObserver& observer) {
  cfg.model.validate();
  cfg.solver.validate();
  const int steps = step_count(cfg.t_final, cfg.model.s);
  for (double ts : cfg.snapshot_times)
    if (ts < 0.0 || ts > cfg.t_final) throw ConfigError("snapshot time outside [0, t_final]");
  BulkField phi = make_initial(cfg.init, cfg.n);

  const bool files = !cfg.output_dir.empty();
  std::ofstream series;
  const fs::path dir(cfg.output_dir);
  if (files) {
    prepare_output(cfg);
    series.open(dir / "series.csv");
    if (!series) throw IoError("cannot open " + (dir / "series.csv").string());
    series << "t,energy,mass_bulk_drift,mass_bottom_drift,mass_top_drift,dissipation,newton_iters,residual\n"
           << std::setprecision(17);
    series.flush();
  }

  std::vector<double> pending = cfg.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snap = 0;
  auto snapshot_due = [&](double t) {
    bool due = false;
    while (next_snap < pending.size() && pending[next_snap] <= t + 1e-12 * std::max(1.0, t)) {
      due = true;
      ++next_snap;
    }
    return due;
  };
  auto write_snap = [&](const BulkField& f, double t) {
    if (!files) return;
    const std::string tag = time_tag(t);
    write_snapshot((dir / ("phi_t" + tag + ".txt")).string(), f, t);
    write_boundary_row((dir / ("phiB_t" + tag + ".txt")).string(), trace(f, Side::bottom));
    write_boundary_row((dir / ("phiT_t" + tag + ".txt")).string(), trace(f, Side::top));
  };

  RunSummary sum;
  sum.initial_masses = masses(phi);
  sum.initial_energy = total_energy(phi, cfg.model, cfg.bc);
  sum.final_energy = sum.initial_energy;
  sum.max_abs = phi.max_abs();
  if (snapshot_due(0.0)) write_snap(phi, 0.0);

  for (int k = 1; k <= steps; ++k) {
    StepResult r = advance(phi, cfg.model, cfg.solver, cfg.bc);
    const double t = k * cfg.model.s;
    const MassTriple& m = r.report.masses;
    const MassTriple drift{m.bulk - sum.initial_masses.bulk, m.bottom - sum.initial_masses.bottom,
                           m.top - sum.initial_masses.top};
    sum.max_drift.bulk = std::max(sum.max_drift.bulk, std::abs(drift.bulk));
    sum.max_drift.bottom = std::max(sum.max_drift.bottom, std::abs(drift.bottom));
    sum.max_drift.top = std::max(sum.max_drift.top, std::abs(drift.top));
    sum.max_abs = std::max(sum.max_abs, r.report.max_abs_iterate);
    if (files) {
      series << t << ',' << r.report.energy << ',' << drift.bulk << ',' << drift.bottom << ',' << drift.top << ','
             << r.report.dissipation << ',' << r.report.newton_iters << ',' << r.report.final_residual << '\n';
      series.flush();
      if (!series) throw IoError("failed writing series.csv");
    }
    if (observer) observer(k, t, phi, r);
    phi = std::move(r.phi);
    sum.final_energy = r.report.energy;
    sum.steps = k;
    sum.t = t;
    if (snapshot_due(t)) write_snap(phi, t);
  }
  sum.phi = std::move(phi);
  return sum;
}

BulkField restrict_fine_to_coarse(const BulkField& fine) {
  const int nf = fine.n();
  if (nf % 2 != 0) throw RangeError("restriction needs an even fine grid");
  const int nc = GridParams::make(nf / 2).n;
  BulkField out(nc);
  for (int j = 0; j <= nc; ++j)
    for (int i = 0; i < nc; ++i) out(i, j) = fine(2 * i, 2 * j);
  return out;
}

BulkField prolong_linear(const BulkField& coarse) {
  const int nc = coarse.n();
  const int nf = 2 * nc;
  BulkField out(nf);
  for (int j = 0; j <= nf; ++j) {
    const int jc = j / 2;
    const int jc2 = (j % 2) ? jc + 1 : jc;
    for (int i = 0; i < nf; ++i) {
      const int ic = i / 2;
      const int ic2 = (i % 2) ? ic + 1 : ic;
      out(i, j) = 0.25 * (coarse(ic, jc) + coarse(ic2, jc) + coarse(ic, jc2) + coarse(ic2, jc2));
    }
  }
  return out;
}

std::vector<BulkField> convergence_solutions(const ConvergenceConfig& cfg, const ConvergenceProgress& progress) {
  if (cfg.grids.size() < 2) throw ConfigError("convergence study needs at least two grids");
  for (std::size_t k = 0; k < cfg.grids.size(); ++k) {
    GridParams::make(cfg.grids[k]);
    if (k > 0 && cfg.grids[k] != 2 * cfg.grids[k - 1])
      throw ConfigError("convergence grids must double from one entry to the next");
  }
  std::vector<BulkField> out;
  for (int n : cfg.grids) {
    const double steps_real = cfg.t_final * n * n / cfg.dt_factor;
    const double steps_round = std::round(steps_real);
    if (steps_round < 1.0 || std::abs(steps_real - steps_round) > 1e-9 * steps_round) {
      std::ostringstream msg;
      msg << "t_final is not an integer number of steps of dt_factor * h^2 on N = " << n;
      throw ConfigError(msg.str());
    }
    const int steps = static_cast<int>(steps_round);
    ModelParams p = cfg.model;
    p.s = cfg.t_final / steps;
    if (progress) progress(n, steps);
    BulkField phi = make_initial(cfg.init, n);
    for (int k = 0; k < steps; ++k) phi = advance(phi, p, cfg.solver, cfg.bc).phi;
    out.push_back(std::move(phi));
  }
  return out;
}

std::vector<ConvergenceRow> cauchy_table(const std::vector<BulkField>& sol) {
  std::vector<ConvergenceRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto rate = [&](const NormPair& prev, const NormPair& cur) {
    return NormPair{std::log2(prev.l2 / cur.l2), std::log2(prev.linf / cur.linf)};
  };
  for (std::size_t k = 0; k + 1 < sol.size(); ++k) {
    const BulkField diff = sol[k] - restrict_fine_to_coarse(sol[k + 1]);
    const BoundaryField db = trace(diff, Side::bottom);
    const BoundaryField dt = trace(diff, Side::top);
    ConvergenceRow row;
    row.n_coarse = sol[k].n();
    row.n_fine = sol[k + 1].n();
    row.whole = {norm_omega(diff), diff.max_abs()};
    row.bottom = {norm_gamma(db), db.max_abs()};
    row.boundary = {std::sqrt(inner_gamma(db, db) + inner_gamma(dt, dt)), std::max(db.max_abs(), dt.max_abs())};
    if (rows.empty()) {
      row.whole_rate = row.bottom_rate = row.boundary_rate = {nan, nan};
    } else {
      row.whole_rate = rate(rows.back().whole, row.whole);
      row.bottom_rate = rate(rows.back().bottom, row.bottom);
      row.boundary_rate = rate(rows.back().boundary, row.boundary);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceConfig& cfg, const ConvergenceProgress& progress) {
  return cauchy_table(convergence_solutions(cfg, progress));
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "block,pair,l2,l2_rate,linf,linf_rate\n" << std::setprecision(17);
  auto block = [&](const char* name, NormPair ConvergenceRow::*val, NormPair ConvergenceRow::*rate) {
    for (const auto& r : rows) {
      out << name << ',' << r.n_coarse << '-' << r.n_fine << ',' << (r.*val).l2 << ',';
      if (!std::isnan((r.*rate).l2)) out << (r.*rate).l2;
      out << ',' << (r.*val).linf << ',';
      if (!std::isnan((r.*rate).linf)) out << (r.*rate).linf;
      out << '\n';
    }
  };
  block("boundary", &ConvergenceRow::boundary, &ConvergenceRow::boundary_rate);
  block("boundary_bottom", &ConvergenceRow::bottom, &ConvergenceRow::bottom_rate);
  block("whole", &ConvergenceRow::whole, &ConvergenceRow::whole_rate);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace fhdbc
