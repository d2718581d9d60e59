#pragma once

// Flory-Huggins potential, the discrete total energy, and the convex
// per-step functional with its gradient and Hessian action.

#include "fhdbc/elliptic.hpp"
#include "fhdbc/grid.hpp"

namespace fhdbc {

struct ModelParams {
  double eps = 0.02;
  double kappa = 0.02;
  double theta0 = 3.0;
  double s = 1e-5;

  /// Throws ConfigError naming the offending parameter.
  void validate() const;
};

/// Boundary treatment: dynamic surface equations on rows 0 and N, or plain
/// homogeneous Neumann with no surface terms.
enum class BoundaryMode { dynamic, neumann };

struct FhValues {
  double value;  // I(x) = (1+x)ln(1+x) + (1-x)ln(1-x)
  double d1;     // I'(x)
  double d2;     // I''(x)
};

/// Throws DomainError unless |x| < 1.
FhValues fh_potential(double x);

/// Discrete total energy E_h. In neumann mode all boundary-row terms
/// (surface potential, surface gradient) are dropped.
double total_energy(const BulkField& phi, const ModelParams& p,
                    BoundaryMode mode = BoundaryMode::dynamic);

/// Throws DomainError if any node has |phi| >= 1.
void require_admissible(const BulkField& phi);

/// One time step's convex functional F(phi), built around phi^n.
///
/// Gradients come in two forms. The nodal form g holds the plain partial
/// derivatives dF/dphi_{i,j}. The scaled form R = W^{-1} g divides by the
/// Omega-quadrature weight h^2 w_j, which makes the Hessian self-adjoint in
/// <.,.>_Omega and keeps every row at O(1) scale.
class StepProblem {
 public:
  StepProblem(BulkField phi_n, const ModelParams& p, BoundaryMode mode = BoundaryMode::dynamic);

  const BulkField& phi_n() const noexcept { return phi_n_; }
  const ModelParams& params() const noexcept { return p_; }
  BoundaryMode mode() const noexcept { return mode_; }
  int n() const noexcept { return phi_n_.n(); }

  /// Throws CompatibilityError if phi - phi^n violates the mass constraints.
  void require_compatible(const BulkField& phi) const;

  double functional(const BulkField& phi) const;
  BulkField gradient(const BulkField& phi) const;
  BulkField scaled_gradient(const BulkField& phi) const;
  /// Hessian action, nodal (W J d) and scaled (J d) forms.
  BulkField hessian_apply(const BulkField& phi, const BulkField& d) const;
  BulkField scaled_hessian_apply(const BulkField& phi, const BulkField& d) const;

  /// Orthogonal projection onto the constraint tangent space.
  void project(BulkField& v) const;
  /// l_inf of a scaled-form vector with rows 0 and N multiplied by h/2 in
  /// dynamic mode, so the surface equations are measured in their own units.
  double natural_norm(const BulkField& scaled) const;

 private:
  BulkField phi_n_;
  ModelParams p_;
  BoundaryMode mode_;
};

double step_functional(const BulkField& phi, const BulkField& phi_n, const ModelParams& p,
                       BoundaryMode mode = BoundaryMode::dynamic);
BulkField step_gradient(const BulkField& phi, const BulkField& phi_n, const ModelParams& p,
                        BoundaryMode mode = BoundaryMode::dynamic);
BulkField hessian_apply(const BulkField& phi, const ModelParams& p, const BulkField& d,
                        BoundaryMode mode = BoundaryMode::dynamic);

}  // namespace fhdbc
