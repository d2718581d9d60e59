#pragma once

// One implicit convex-splitting step, solved as a mass-constrained convex
// minimization by damped Newton with a fraction-to-boundary safeguard.

#include <optional>

#include "fhdbc/elliptic.hpp"
#include "fhdbc/energy.hpp"
#include "fhdbc/grid.hpp"

namespace fhdbc {

struct SolverConfig {
  double newton_tol = 1e-10;
  int max_newton = 50;
  double linear_tol = 1e-12;
  int max_linear = 400;
  double fraction_to_boundary = 0.95;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct StepReport {
  int newton_iters = 0;
  int linear_iters = 0;
  double final_residual = 0.0;
  double energy = 0.0;
  MassTriple masses;
  double dissipation = 0.0;
  /// Largest |phi| over every iterate and line-search trial point.
  double max_abs_iterate = 0.0;
};

/// Lagrange multipliers of the three mass constraints.
struct Multipliers {
  double bulk = 0.0;
  double bottom = 0.0;
  double top = 0.0;
};

struct Potentials {
  BulkField mu;
  BoundaryField mu_b;
  BoundaryField mu_t;
  /// phi^{n+1} with ghost rows reconstructed from the surface equations.
  GhostField phi_ghost;
};

struct StepResult {
  BulkField phi;
  BulkField mu;
  BoundaryField mu_b;
  BoundaryField mu_t;
  GhostField phi_ghost;
  Multipliers multipliers;
  StepReport report;
};

/// Relative l_inf residuals of the discrete equations. Equations that apply
/// a difference operator A to a potential x report the normwise backward
/// error ||A x - b||_inf / max(1, ||A||_inf ||x||_inf + ||b||_inf).
/// Pointwise definitions report ||lhs - rhs||_inf / max(1, largest term).
struct SchemeResidual {
  double update = 0.0;          // (phi^{n+1}-phi^n)/s = Delta_h mu
  double potential = 0.0;       // mu = eps^{-1}(I' - theta0 phi^n) - eps Delta_h phi
  double mu_neumann = 0.0;      // centered normal difference of mu on rows 0, N
  double surface_update_b = 0.0;
  double surface_potential_b = 0.0;
  double surface_update_t = 0.0;
  double surface_potential_t = 0.0;

  double max() const;
};

/// Advances phi^n by one step. initial_guess defaults to phi^n and must
/// carry the same three means.
StepResult advance(const BulkField& phi_n, const ModelParams& p, const SolverConfig& cfg,
                   const std::optional<BulkField>& initial_guess = std::nullopt);

/// Same bulk scheme with homogeneous Neumann rows and only the bulk mass
/// constrained.
StepResult advance_neumann(const BulkField& phi_n, const ModelParams& p, const SolverConfig& cfg,
                           const std::optional<BulkField>& initial_guess = std::nullopt);

/// Dispatches on mode.
StepResult advance(const BulkField& phi_n, const ModelParams& p, const SolverConfig& cfg, BoundaryMode mode,
                   const std::optional<BulkField>& initial_guess = std::nullopt);

/// Chemical potentials and ghost rows for a converged phi^{n+1}.
Potentials recover_potentials(const BulkField& phi_next, const BulkField& phi_n, const ModelParams& p,
                              BoundaryMode mode = BoundaryMode::dynamic);

SchemeResidual scheme_residual(const StepResult& result, const BulkField& phi_n, const ModelParams& p,
                               BoundaryMode mode = BoundaryMode::dynamic);

/// s (||grad_h mu||^2 + ||D_x mu_B||^2 + ||D_x mu_T||^2); the surface part
/// is omitted in neumann mode.
double dissipation(const BulkField& mu, const BoundaryField& mu_b, const BoundaryField& mu_t,
                   const ModelParams& p, BoundaryMode mode = BoundaryMode::dynamic);

}  // namespace fhdbc
