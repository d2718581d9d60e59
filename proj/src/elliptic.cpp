#include "fhdbc/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fhdbc/spectral.hpp"

namespace fhdbc {

namespace sp = spectral;

BulkField apply_Lh(const BulkField& phi) {
  const int n = phi.n();
  const double inv_h2 = static_cast<double>(n) * n;
  BulkField out(n);
  for (int j = 0; j <= n; ++j) {
    const int up = j == n ? n - 1 : j + 1;
    const int dn = j == 0 ? 1 : j - 1;
    for (int i = 0; i < n; ++i) {
      out(i, j) = (4.0 * phi(i, j) - phi(i + 1, j) - phi(i - 1, j) - phi(i, up) - phi(i, dn)) * inv_h2;
    }
  }
  return out;
}

namespace detail {

BulkField lh_pinv(const BulkField& r) {
  const int n = r.n();
  sp::ModeField m = sp::to_modes(r);
  for (int k = 0; k < sp::mode_count(n); ++k) sp::lh_mode_solve(k, n, m.column(k));
  BulkField psi = sp::from_modes(m);
  remove_bulk_mean(psi);
  return psi;
}

BoundaryField neg_lap_gamma_pinv(const BoundaryField& r) {
  const int n = r.n();
  const int m = sp::mode_count(n);
  auto& tr = sp::row_transform(n);
  std::vector<sp::Complex> c(m);
  tr.forward(r.values(), c);
  c[0] = 0.0;
  for (int k = 1; k < m; ++k) c[k] /= sp::x_eigenvalue(k, n);
  BoundaryField psi(n);
  tr.inverse(c, psi.values());
  const double mean = mean_gamma(psi);
  for (double& v : psi.values()) v -= mean;
  return psi;
}

}  // namespace detail

double lh_relative_residual(const BulkField& x, const BulkField& r) {
  const double norm_l = 8.0 * static_cast<double>(x.n()) * x.n();
  const double denom = norm_l * x.max_abs() + r.max_abs();
  if (denom == 0.0) return 0.0;
  return (apply_Lh(x) - r).max_abs() / denom;
}

namespace {

double gamma_relative_residual(const BoundaryField& x, const BoundaryField& r) {
  const double norm_l = 4.0 * static_cast<double>(x.n()) * x.n();
  const double denom = norm_l * x.max_abs() + r.max_abs();
  if (denom == 0.0) return 0.0;
  BoundaryField res = -1.0 * laplacian_gamma(x);
  res -= r;
  return res.max_abs() / denom;
}

constexpr int kRefinementSweeps = 3;
constexpr double kMeanZeroTol = 1e-12;

}  // namespace

BulkField solve_Lh(const BulkField& r, double tol) {
  if (!(tol > 0.0)) throw RangeError("solve_Lh tolerance must be positive");
  const double mean = mean_omega(r);
  if (std::abs(mean) > kMeanZeroTol * std::max(1.0, r.max_abs()))
    throw CompatibilityError("solve_Lh: right-hand side has weighted mean " + std::to_string(mean));
  BulkField psi = detail::lh_pinv(r);
  double res = lh_relative_residual(psi, r);
  for (int sweep = 0; sweep < kRefinementSweeps && res > tol; ++sweep) {
    BulkField defect = r - apply_Lh(psi);
    remove_bulk_mean(defect);
    psi += detail::lh_pinv(defect);
    res = lh_relative_residual(psi, r);
  }
  if (res > tol) throw SolverError("solve_Lh: relative residual above tolerance", res);
  return psi;
}

BoundaryField solve_neg_lap_gamma(const BoundaryField& r, double tol) {
  if (!(tol > 0.0)) throw RangeError("solve_neg_lap_gamma tolerance must be positive");
  const double mean = mean_gamma(r);
  if (std::abs(mean) > kMeanZeroTol * std::max(1.0, r.max_abs()))
    throw CompatibilityError("solve_neg_lap_gamma: right-hand side has mean " + std::to_string(mean));
  BoundaryField psi = detail::neg_lap_gamma_pinv(r);
  double res = gamma_relative_residual(psi, r);
  for (int sweep = 0; sweep < kRefinementSweeps && res > tol; ++sweep) {
    BoundaryField defect = r + laplacian_gamma(psi);
    psi += detail::neg_lap_gamma_pinv(defect);
    res = gamma_relative_residual(psi, r);
  }
  if (res > tol) throw SolverError("solve_neg_lap_gamma: relative residual above tolerance", res);
  return psi;
}

double inner_minus1(const BulkField& f, const BulkField& g) { return inner_omega(f, solve_Lh(g)); }
double norm_minus1(const BulkField& f) { return std::sqrt(std::max(0.0, inner_minus1(f, f))); }

double inner_minus1_gamma(const BoundaryField& f, const BoundaryField& g) {
  return inner_gamma(f, solve_neg_lap_gamma(g));
}
double norm_minus1_gamma(const BoundaryField& f) {
  return std::sqrt(std::max(0.0, inner_minus1_gamma(f, f)));
}

MassTriple masses(const BulkField& phi) {
  return {mean_omega(phi), mean_gamma(trace(phi, Side::bottom)), mean_gamma(trace(phi, Side::top))};
}

BulkField ConstantMassFunction::field(int n) const {
  BulkField out(n, f0);
  for (int i = 0; i < n; ++i) {
    out(i, 0) = fB;
    out(i, n) = fT;
  }
  return out;
}

ConstantMassFunction constant_mass_part(const BulkField& psi) {
  const double h = psi.h();
  const MassTriple m = masses(psi);
  return {(m.bulk - 0.5 * h * (m.bottom + m.top)) / (1.0 - h), m.bottom, m.top};
}

MassDecomposition mass_decompose(const BulkField& psi) {
  MassDecomposition out{constant_mass_part(psi), psi};
  remove_constant_mass_part(out.q);
  return out;
}

void remove_constant_mass_part(BulkField& psi) {
  const ConstantMassFunction a = constant_mass_part(psi);
  const int n = psi.n();
  for (int j = 0; j <= n; ++j) {
    const double c = j == 0 ? a.fB : (j == n ? a.fT : a.f0);
    for (double& v : psi.row(j)) v -= c;
  }
}

void remove_bulk_mean(BulkField& psi) {
  const double mean = mean_omega(psi);
  for (double& v : psi.values()) v -= mean;
}

}  // namespace fhdbc
