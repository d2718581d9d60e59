#pragma once

// Initial data, the time-stepping driver with its diagnostics files, and the
// coarse/fine Cauchy-difference convergence study.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fhdbc/energy.hpp"
#include "fhdbc/grid.hpp"
#include "fhdbc/stepper.hpp"

namespace fhdbc {

enum class InitKind { cosine, spinodal, square_droplet, two_droplets, fusion_band, custom_file };

const char* to_string(InitKind k);
InitKind parse_init_kind(const std::string& s);

struct InitialCondition {
  InitKind kind = InitKind::cosine;
  // cosine: amplitude * cos(2 pi m x) cos(2 pi m y)
  double amplitude = 0.8;
  int wavenumber = 2;
  // spinodal: mean + noise * r, r uniform in [-1, 1]; rows 0 and N held at mean
  double mean = 0.2;
  double noise = 0.02;
  std::uint64_t seed = 1;
  // droplets: +level inside, -level outside, tanh profile over one cell
  double level = 0.8;
  double square_side = 0.4;
  double square_cx = 0.5;
  double square_cy = 0.2;
  double radius = 0.15;
  double band_width = 0.2;
  double band_hole_radius = 0.1;
  std::string file;
};

/// Throws ConfigError for inadmissible data (max |phi| > 1 - 1e-6) and
/// IoError for unreadable custom files.
BulkField make_initial(const InitialCondition& ic, int n);

struct RunConfig {
  int n = 128;
  ModelParams model;
  SolverConfig solver;
  InitialCondition init;
  BoundaryMode bc = BoundaryMode::dynamic;
  double t_final = 1e-2;
  std::vector<double> snapshot_times;
  /// Empty: no files are written.
  std::string output_dir;
  bool overwrite = false;
};

/// Called after every accepted step with the pre-step state.
using StepObserver = std::function<void(int step, double t, const BulkField& phi_prev, const StepResult& result)>;

struct RunSummary {
  BulkField phi;
  int steps = 0;
  double t = 0.0;
  double max_abs = 0.0;
  MassTriple initial_masses;
  MassTriple max_drift;
  double initial_energy = 0.0;
  double final_energy = 0.0;
};

/// Number of steps of size s needed to reach t; throws ConfigError unless
/// t/s is an integer to relative accuracy 1e-9.
int step_count(double t, double s);

RunSummary run_simulation(const RunConfig& cfg, const StepObserver& observer = {});

/// Snapshot text format: header `N <N> h <h> t <t>`, then rows j = 0..N.
void write_snapshot(const std::string& path, const BulkField& phi, double t);
void write_boundary_row(const std::string& path, const BoundaryField& row);
BulkField read_snapshot(const std::string& path);

/// Coarse node (i, j) takes the fine value at (2i, 2j).
BulkField restrict_fine_to_coarse(const BulkField& fine);
/// Bilinear interpolation onto the grid with twice the resolution.
BulkField prolong_linear(const BulkField& coarse);

struct NormPair {
  double l2 = 0.0;
  double linf = 0.0;
};

struct ConvergenceRow {
  int n_coarse = 0;
  int n_fine = 0;
  NormPair whole;
  NormPair bottom;
  /// Bottom and top traces taken together.
  NormPair boundary;
  /// log2 ratio to the previous row; NaN on the first row.
  NormPair whole_rate;
  NormPair bottom_rate;
  NormPair boundary_rate;
};

struct ConvergenceConfig {
  std::vector<int> grids{16, 32, 64, 128};
  ModelParams model{0.02, 0.02, 3.0, 1.0};
  SolverConfig solver;
  InitialCondition init;
  BoundaryMode bc = BoundaryMode::dynamic;
  double t_final = 1e-3;
  /// s = dt_factor * h^2 on every grid.
  double dt_factor = 1e-3;
};

using ConvergenceProgress = std::function<void(int n, int steps)>;

/// The final state on each grid.
std::vector<BulkField> convergence_solutions(const ConvergenceConfig& cfg, const ConvergenceProgress& progress = {});
std::vector<ConvergenceRow> cauchy_table(const std::vector<BulkField>& solutions);
std::vector<ConvergenceRow> convergence_study(const ConvergenceConfig& cfg, const ConvergenceProgress& progress = {});

/// Columns: block,pair,l2,l2_rate,linf,linf_rate for the boundary,
/// boundary_bottom and whole blocks.
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

}  // namespace fhdbc
