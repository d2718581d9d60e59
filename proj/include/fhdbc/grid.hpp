#pragma once

// Grid functions on the unit square, periodic in x and bounded by the
// physical rows y = 0 (bottom) and y = 1 (top), together with the staggered
// average/difference calculus, the discrete Laplacians and the weighted
// inner products built on top of it.
//
// Indexing: x-index i is always taken modulo N; row index j is physical.
// Storage is row-major (j outer, i inner) and every reduction walks it in
// that order, so diagnostics are bit-reproducible.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fhdbc/errors.hpp"

namespace fhdbc {

/// Uniform mesh: N cells per direction, h = 1/N.
struct GridParams {
  int n = 0;
  double h = 0.0;

  /// Validates N >= 4, N even, and h * N == 1 in double arithmetic.
  static GridParams make(int n);
};

enum class Side { bottom, top };

/// Rows [row_begin, row_begin + rows) of values periodic in i with period n.
/// Base for all strong field types below; not used directly.
class RowLattice {
 public:
  RowLattice() = default;
  RowLattice(int n, int row_begin, int rows, double value);

  int n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  int row_begin() const noexcept { return row_begin_; }
  int row_end() const noexcept { return row_begin_ + rows_; }
  int rows() const noexcept { return rows_; }
  bool has_row(int j) const noexcept { return j >= row_begin_ && j < row_end(); }

  double operator()(int i, int j) const { return data_[offset(i, j)]; }
  double& operator()(int i, int j) { return data_[offset(i, j)]; }

  std::span<double> row(int j) { return {data_.data() + (j - row_begin_) * n_, static_cast<std::size_t>(n_)}; }
  std::span<const double> row(int j) const {
    return {data_.data() + (j - row_begin_) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const RowLattice& o) const noexcept {
    return n_ == o.n_ && row_begin_ == o.row_begin_ && rows_ == o.rows_;
  }

 protected:
  int wrap(int i) const noexcept {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }
  std::size_t offset(int i, int j) const noexcept {
    return static_cast<std::size_t>(j - row_begin_) * n_ + wrap(i);
  }

  int n_ = 0;
  int row_begin_ = 0;
  int rows_ = 0;
  std::vector<double> data_;
};

/// Elementwise vector-space operations shared by the concrete field types.
template <class Derived>
class FieldArithmetic : public RowLattice {
 public:
  using RowLattice::RowLattice;

  Derived& operator+=(const Derived& o) {
    check(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return self();
  }
  Derived& operator-=(const Derived& o) {
    check(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return self();
  }
  Derived& operator*=(double a) {
    for (double& v : data_) v *= a;
    return self();
  }
  /// this += a * x
  Derived& axpy(double a, const Derived& x) {
    check(x);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += a * x.data_[k];
    return self();
  }

  friend Derived operator+(Derived a, const Derived& b) { return a += b; }
  friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
  friend Derived operator*(double s, Derived a) { return a *= s; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Derived& self() { return static_cast<Derived&>(*this); }
  void check(const RowLattice& o) const {
    if (!same_shape(o)) throw RangeError("field shape mismatch");
  }
};

/// V_{p,x}(Omega): nodes (i, j), j = 0..N.
class BulkField : public FieldArithmetic<BulkField> {
 public:
  BulkField() = default;
  explicit BulkField(int n, double value = 0.0) : FieldArithmetic(n, 0, n + 1, value) {}
};

/// V+_{p,x}(Omega): nodes (i, j), j = -1..N+1.
class GhostField : public FieldArithmetic<GhostField> {
 public:
  GhostField() = default;
  explicit GhostField(int n, double value = 0.0) : FieldArithmetic(n, -1, n + 3, value) {}
};

/// E_{p,x}(Omega): x-faces (i+1/2, j), j = 0..N. Entry (i, j) holds i+1/2.
class EdgeFieldX : public FieldArithmetic<EdgeFieldX> {
 public:
  EdgeFieldX() = default;
  explicit EdgeFieldX(int n, double value = 0.0) : FieldArithmetic(n, 0, n + 1, value) {}
};

/// y-faces (i, j+1/2). Entry (i, j) holds j+1/2. The plain variant
/// N_{p,x} covers j = 0..N-1; the extended variant N+_{p,x} covers j = -1..N.
class EdgeFieldY : public FieldArithmetic<EdgeFieldY> {
 public:
  EdgeFieldY() = default;
  EdgeFieldY(int n, bool extended, double value = 0.0)
      : FieldArithmetic(n, extended ? -1 : 0, extended ? n + 2 : n, value) {}
  bool extended() const noexcept { return row_begin_ == -1; }
};

/// V_{p,x}(Gamma): one periodic row, bottom or top trace.
class BoundaryField : public FieldArithmetic<BoundaryField> {
 public:
  BoundaryField() = default;
  explicit BoundaryField(int n, double value = 0.0) : FieldArithmetic(n, 0, 1, value) {}

  double operator()(int i) const { return data_[wrap(i)]; }
  double& operator()(int i) { return data_[wrap(i)]; }
  double operator[](int i) const { return data_[wrap(i)]; }
  double& operator[](int i) { return data_[wrap(i)]; }
};

template <class Edge>
struct FacePair {
  Edge avg;
  Edge diff;
};

struct CellPair {
  BulkField avg;
  BulkField diff;
};

// ---------------------------------------------------------------------------
// Staggered calculus.

/// A_x f, D_x f on x-faces.
FacePair<EdgeFieldX> face_ops_x(const BulkField& f);
/// A_x, D_x for a ghosted field (rows 0..N only are used).
FacePair<EdgeFieldX> face_ops_x(const GhostField& f);
/// A_y f, D_y f on the extended y-faces j+1/2, j = -1..N.
FacePair<EdgeFieldY> face_ops_y(const GhostField& f);

/// a_x, d_x back onto nodes.
CellPair cell_ops_x(const EdgeFieldX& fe);
/// a_y, d_y back onto nodes j = 0..N; throws RangeError unless extended.
CellPair cell_ops_y(const EdgeFieldY& fe);

/// nabla_h . (g f) = d_x(A_x g f^x) + d_y(A_y g f^y).
BulkField divergence(const GhostField& g, const EdgeFieldX& fx, const EdgeFieldY& fy);

/// Five-point Laplacian on rows 0..N using the ghost rows.
BulkField laplacian_5pt(const GhostField& phi);

/// Periodic three-point second difference along a boundary row.
BoundaryField laplacian_gamma(const BoundaryField& g);

/// D_x on a boundary row; entry i holds (g_{i+1} - g_i)/h.
BoundaryField diff_gamma(const BoundaryField& g);

/// Centered normal difference (phi_{.,1} - phi_{.,-1})/(2h) or its top analogue.
BoundaryField boundary_normal_derivative(const GhostField& phi, Side side);

// ---------------------------------------------------------------------------
// Inner products and norms.

/// Trapezoid weight w_j: 1/2 on the physical rows, 1 inside.
inline double row_weight(int j, int n) noexcept { return (j == 0 || j == n) ? 0.5 : 1.0; }

double inner_omega(const BulkField& f, const BulkField& g);
double norm_omega(const BulkField& f);
double inner_gamma(const BoundaryField& f, const BoundaryField& g);
double norm_gamma(const BoundaryField& f);

/// Weighted means <f,1>_Omega and <f,1>_Gamma (|Omega| = |Gamma| = 1).
double mean_omega(const BulkField& f);
double mean_gamma(const BoundaryField& f);

/// [f^x, g^x] = <a_x(f^x g^x), 1>_Omega.
double edge_inner_x(const EdgeFieldX& f, const EdgeFieldX& g);
/// [f^y, g^y] = h^2 sum over j = 0..N-1, no boundary weights.
double edge_inner_y(const EdgeFieldY& f, const EdgeFieldY& g);
double edge_inner(const EdgeFieldX& fx, const EdgeFieldY& fy, const EdgeFieldX& gx,
                  const EdgeFieldY& gy);
/// ||nabla_h f||_2^2 = [D_x f, D_x f] + [D_y f, D_y f].
double grad_norm_sq(const GhostField& f);

// ---------------------------------------------------------------------------
// Traces and ghost extension.

BoundaryField trace(const BulkField& f, Side side);
void set_trace(BulkField& f, Side side, const BoundaryField& values);

/// Copy rows 0..N and attach the given ghost rows j = -1 and j = N+1.
GhostField with_ghosts(const BulkField& f, const BoundaryField& below, const BoundaryField& above);
/// Even reflection f_{i,-1} = f_{i,1}, f_{i,N+1} = f_{i,N-1}.
GhostField neumann_extension(const BulkField& f);
/// Restriction of a ghosted field to rows 0..N.
BulkField interior(const GhostField& f);

/// f(p_i, p_j) sampled on the nodes.
template <class Fn>
BulkField sample(int n, Fn&& fn) {
  BulkField out(n);
  const double h = 1.0 / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = fn(i * h, j * h);
  return out;
}

}  // namespace fhdbc
