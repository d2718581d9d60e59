#pragma once

// The ghost-free Neumann operator L_h, its inverse on mean-zero data, the
// periodic boundary inverse (-Delta_h^x)^{-1}, the induced -1 inner products,
// and the bulk/bottom/top mass decomposition.

#include "fhdbc/grid.hpp"

namespace fhdbc {

/// L_h: -Delta_h inside; on rows 0 and N the reflected stencil
/// -Delta_h^x phi - 2(phi_{., 1} - phi_{., 0})/h^2 (and its top mirror).
BulkField apply_Lh(const BulkField& phi);

/// Solves L_h psi = r with <psi, 1>_Omega = 0.
/// Throws CompatibilityError if <r, 1>_Omega is not zero relative to ||r||,
/// SolverError if the normwise relative residual exceeds tol.
BulkField solve_Lh(const BulkField& r, double tol = 1e-12);

/// Solves -Delta_h^x psi = r on a boundary row with <psi, 1>_Gamma = 0.
BoundaryField solve_neg_lap_gamma(const BoundaryField& r, double tol = 1e-12);

double inner_minus1(const BulkField& f, const BulkField& g);
double norm_minus1(const BulkField& f);
double inner_minus1_gamma(const BoundaryField& f, const BoundaryField& g);
double norm_minus1_gamma(const BoundaryField& f);

struct MassTriple {
  double bulk = 0.0;
  double bottom = 0.0;
  double top = 0.0;
};

/// (<phi,1>_Omega, <phi_B,1>_Gamma, <phi_T,1>_Gamma).
MassTriple masses(const BulkField& phi);

/// Row-constant function: f_B on row 0, f_T on row N, f_0 elsewhere.
struct ConstantMassFunction {
  double f0 = 0.0;
  double fB = 0.0;
  double fT = 0.0;

  BulkField field(int n) const;
};

struct MassDecomposition {
  ConstantMassFunction a;
  BulkField q;
};

/// psi = a + q with q bulk/bottom/top mean-zero and a a constant-mass
/// function. q is the Omega-orthogonal projection of psi onto that space.
MassDecomposition mass_decompose(const BulkField& psi);
ConstantMassFunction constant_mass_part(const BulkField& psi);

/// Mean-zero projections: all three means (dynamic) or the bulk mean only.
void remove_constant_mass_part(BulkField& psi);
void remove_bulk_mean(BulkField& psi);

/// Normwise backward error ||L x - r||_inf / (||L||_inf ||x||_inf + ||r||_inf).
double lh_relative_residual(const BulkField& x, const BulkField& r);

namespace detail {

/// Unchecked pseudo-inverses for inner loops: the bulk mean of r (resp. the
/// mean of the row) is ignored and the returned solution is mean-zero.
BulkField lh_pinv(const BulkField& r);
BoundaryField neg_lap_gamma_pinv(const BoundaryField& r);

}  // namespace detail

}  // namespace fhdbc
