#pragma once

// Fourier decomposition in the periodic x-direction and the per-mode solves
// in y that back the elliptic inverses and the Newton preconditioner.

#include <complex>
#include <span>
#include <vector>

#include "fhdbc/grid.hpp"

namespace fhdbc::spectral {

using Complex = std::complex<double>;

/// Number of retained real-to-complex modes, N/2 + 1.
inline int mode_count(int n) noexcept { return n / 2 + 1; }

/// Symbol of -Delta_h^x on mode k: (4/h^2) sin^2(pi k / N).
double x_eigenvalue(int k, int n);

/// Real-to-complex transform of one periodic row of length N.
/// Forward is unnormalized; inverse divides by N.
class RowTransform {
 public:
  explicit RowTransform(int n);
  ~RowTransform();
  RowTransform(const RowTransform&) = delete;
  RowTransform& operator=(const RowTransform&) = delete;

  int n() const noexcept { return n_; }
  void forward(std::span<const double> x, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<double> x);

 private:
  int n_;
  double* real_;
  void* spec_;
  void* plan_fwd_;
  void* plan_inv_;
};

/// Per-thread cached transform for size n.
RowTransform& row_transform(int n);

/// Mode coefficients of a bulk field, stored mode-major: entry (k, j) for
/// k = 0..N/2, j = 0..N, so each mode's y-column is contiguous.
class ModeField {
 public:
  ModeField() = default;
  explicit ModeField(int n) : n_(n), data_(static_cast<std::size_t>(mode_count(n)) * (n + 1)) {}

  int n() const noexcept { return n_; }
  std::span<Complex> column(int k) {
    return {data_.data() + static_cast<std::size_t>(k) * (n_ + 1), static_cast<std::size_t>(n_ + 1)};
  }
  std::span<const Complex> column(int k) const {
    return {data_.data() + static_cast<std::size_t>(k) * (n_ + 1), static_cast<std::size_t>(n_ + 1)};
  }

 private:
  int n_ = 0;
  std::vector<Complex> data_;
};

ModeField to_modes(const BulkField& f);
BulkField from_modes(const ModeField& m);

/// Tridiagonal y-operator T_k of L_h on x-mode k: lambda_k + the reflected
/// 1-D Neumann second difference. Rows 0 and N carry off-diagonal -2/h^2.
struct Tridiag {
  std::vector<double> sub, diag, sup;
};
Tridiag lh_mode_matrix(int k, int n);

/// Solves T x = b in place (Thomas, no pivoting). T must be nonsingular.
void thomas_solve(const Tridiag& t, std::span<Complex> b);

/// Solves T_k v = r for one mode column. For k = 0 the singular system is
/// pinned by v_0 = 0; the caller removes the weighted mean afterwards.
void lh_mode_solve(int k, int n, std::span<Complex> r);

/// Banded LU of the pentadiagonal preconditioner matrix for one x-mode,
///   (1/s) I + T_k D + eps T_k^2,
/// with D diagonal. Real coefficients; applied to complex right-hand sides.
class PentaFactor {
 public:
  PentaFactor() = default;
  PentaFactor(const Tridiag& t, std::span<const double> d, double inv_s, double eps);
  /// b <- M^{-1} b.
  void solve(std::span<Complex> b) const;

 private:
  int m_ = 0;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  mutable std::vector<double> work_;
};

/// T x for one mode column.
void tridiag_apply(const Tridiag& t, std::span<const Complex> x, std::span<Complex> out);

}  // namespace fhdbc::spectral
