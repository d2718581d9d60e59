// Command-line driver: run | converge | check-ops.
//
// Exit status: 0 success, 1 unexpected error, 2 configuration, 3 I/O,
// 4 solver failure, 5 positivity/domain violation, 6 failed self-check.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fhdbc/check_ops.hpp"
#include "fhdbc/config.hpp"
#include "fhdbc/errors.hpp"
#include "fhdbc/harness.hpp"

namespace {

using namespace fhdbc;

enum Exit { ok = 0, other = 1, config = 2, io = 3, solver = 4, domain = 5, check = 6 };

/// Every configuration key, in echo order.
std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  std::istringstream in(echo_config(default_cli_config()));
  std::string line;
  while (std::getline(in, line)) keys.push_back(line.substr(0, line.find(' ')));
  return keys;
}

struct Options {
  std::string config_file;
  std::map<std::string, std::string> flags;
};

void add_config_options(CLI::App* sub, Options& opts, const std::vector<std::string>& keys) {
  sub->add_option("-c,--config", opts.config_file, "key = value configuration file");
  for (const auto& k : keys) {
    sub->add_option_function<std::string>(
        "--" + k, [&opts, k](const std::string& v) { opts.flags[k] = v; }, "override '" + k + "'");
  }
}

CliConfig resolve(const Options& opts) {
  CliConfig cfg = default_cli_config();
  if (!opts.config_file.empty()) apply_config_file(cfg, opts.config_file);
  for (const auto& [k, v] : opts.flags) apply_setting(cfg, k, v);
  validate(cfg);
  std::cout << "# effective configuration\n" << echo_config(cfg) << std::flush;
  return cfg;
}

int cmd_run(const Options& opts) {
  const CliConfig cfg = resolve(opts);
  const int steps = step_count(cfg.run.t_final, cfg.run.model.s);
  const int every = std::max(1, steps / 20);
  const RunSummary sum = run_simulation(cfg.run, [&](int k, double t, const BulkField&, const StepResult& r) {
    if (k % every == 0 || k == steps)
      std::printf("step %d t %.6e energy %.12e newton %d residual %.3e\n", k, t, r.report.energy,
                  r.report.newton_iters, r.report.final_residual);
  });
  std::printf("done: %d steps, t = %.6e, energy %.12e -> %.12e, max |phi| = %.15f\n", sum.steps, sum.t,
              sum.initial_energy, sum.final_energy, sum.max_abs);
  std::printf("max mass drift: bulk %.3e bottom %.3e top %.3e\n", sum.max_drift.bulk, sum.max_drift.bottom,
              sum.max_drift.top);
  return ok;
}

int cmd_converge(const Options& opts, const std::string& csv) {
  const CliConfig cfg = resolve(opts);
  ConvergenceConfig cc;
  cc.grids = cfg.grids;
  cc.model = cfg.run.model;
  cc.solver = cfg.run.solver;
  cc.init = cfg.run.init;
  cc.bc = cfg.run.bc;
  cc.t_final = cfg.study_t_final;
  cc.dt_factor = cfg.dt_factor;
  const auto rows = convergence_study(cc, [](int n, int steps) {
    std::printf("solving N = %d (%d steps)\n", n, steps);
    std::fflush(stdout);
  });
  std::string path = csv;
  if (path.empty() && !cfg.run.output_dir.empty()) {
    std::filesystem::create_directories(cfg.run.output_dir);
    path = (std::filesystem::path(cfg.run.output_dir) / "convergence.csv").string();
  }
  if (!path.empty()) write_convergence_csv(path, rows);
  std::printf("%-9s %-8s %12s %8s %12s %8s\n", "block", "pair", "l2", "rate", "linf", "rate");
  auto print = [&](const char* name, NormPair ConvergenceRow::*v, NormPair ConvergenceRow::*r) {
    for (const auto& row : rows) {
      std::printf("%-9s %3d-%-4d %12.4e %8.4f %12.4e %8.4f\n", name, row.n_coarse, row.n_fine, (row.*v).l2,
                  (row.*r).l2, (row.*v).linf, (row.*r).linf);
    }
  };
  print("boundary", &ConvergenceRow::boundary, &ConvergenceRow::boundary_rate);
  print("bottom", &ConvergenceRow::bottom, &ConvergenceRow::bottom_rate);
  print("whole", &ConvergenceRow::whole, &ConvergenceRow::whole_rate);
  return ok;
}

int cmd_check_ops() {
  const auto results = run_operator_checks();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s  %-44s N=%d  value %.3e  tol %.1e\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.n, r.value,
                r.tol);
    if (!r.pass) ++failed;
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed ? check : ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flory-Huggins Cahn-Hilliard solver with dynamic boundary conditions"};
  app.require_subcommand(1);
  const auto keys = config_keys();

  Options run_opts, conv_opts;
  std::string csv;
  auto* run = app.add_subcommand("run", "time-step one configuration, writing series.csv and snapshots");
  add_config_options(run, run_opts, keys);
  auto* conv = app.add_subcommand("converge", "coarse/fine Cauchy-difference convergence study");
  add_config_options(conv, conv_opts, keys);
  conv->add_option("--csv", csv, "convergence table output path");
  auto* chk = app.add_subcommand("check-ops", "operator and derivative self-checks on N = 4, 8");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (conv->parsed()) return cmd_converge(conv_opts, csv);
    if (chk->parsed()) return cmd_check_ops();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config;
  } catch (const RangeError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return io;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return solver;
  } catch (const DomainError& e) {
    std::cerr << "positivity violation: " << e.what() << '\n';
    return domain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return other;
  }
  return other;
}
