#include "fhdbc/grid.hpp"

#include <string>

namespace fhdbc {

GridParams GridParams::make(int n) {
  if (n < 4) throw RangeError("grid size N must be at least 4, got " + std::to_string(n));
  if (n % 2 != 0) throw RangeError("grid size N must be even, got " + std::to_string(n));
  const double h = 1.0 / n;
  if (h * n != 1.0) throw RangeError("h * N != 1 in floating point for N = " + std::to_string(n));
  return {n, h};
}

RowLattice::RowLattice(int n, int row_begin, int rows, double value)
    : n_(n), row_begin_(row_begin), rows_(rows), data_(static_cast<std::size_t>(n) * rows, value) {
  if (n < 1 || rows < 1) throw RangeError("empty lattice");
}

namespace {

void require_same_n(const RowLattice& a, const RowLattice& b) {
  if (a.n() != b.n()) throw RangeError("grid size mismatch");
}

}  // namespace

FacePair<EdgeFieldX> face_ops_x(const BulkField& f) {
  const int n = f.n();
  const double inv_h = static_cast<double>(n);
  FacePair<EdgeFieldX> out{EdgeFieldX(n), EdgeFieldX(n)};
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.avg(i, j) = 0.5 * (f(i + 1, j) + f(i, j));
      out.diff(i, j) = (f(i + 1, j) - f(i, j)) * inv_h;
    }
  }
  return out;
}

FacePair<EdgeFieldX> face_ops_x(const GhostField& f) { return face_ops_x(interior(f)); }

FacePair<EdgeFieldY> face_ops_y(const GhostField& f) {
  const int n = f.n();
  const double inv_h = static_cast<double>(n);
  FacePair<EdgeFieldY> out{EdgeFieldY(n, true), EdgeFieldY(n, true)};
  for (int j = -1; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.avg(i, j) = 0.5 * (f(i, j + 1) + f(i, j));
      out.diff(i, j) = (f(i, j + 1) - f(i, j)) * inv_h;
    }
  }
  return out;
}

CellPair cell_ops_x(const EdgeFieldX& fe) {
  const int n = fe.n();
  const double inv_h = static_cast<double>(n);
  CellPair out{BulkField(n), BulkField(n)};
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.avg(i, j) = 0.5 * (fe(i, j) + fe(i - 1, j));
      out.diff(i, j) = (fe(i, j) - fe(i - 1, j)) * inv_h;
    }
  }
  return out;
}

CellPair cell_ops_y(const EdgeFieldY& fe) {
  if (!fe.extended())
    throw RangeError("a_y/d_y onto rows 0..N need the extended face range j+1/2, j = -1..N");
  const int n = fe.n();
  const double inv_h = static_cast<double>(n);
  CellPair out{BulkField(n), BulkField(n)};
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.avg(i, j) = 0.5 * (fe(i, j) + fe(i, j - 1));
      out.diff(i, j) = (fe(i, j) - fe(i, j - 1)) * inv_h;
    }
  }
  return out;
}

BulkField divergence(const GhostField& g, const EdgeFieldX& fx, const EdgeFieldY& fy) {
  require_same_n(g, fx);
  require_same_n(g, fy);
  if (!fy.extended()) throw RangeError("divergence needs f^y on the extended face range");
  const int n = g.n();
  EdgeFieldX flux_x = face_ops_x(g).avg;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) flux_x(i, j) *= fx(i, j);
  EdgeFieldY flux_y = face_ops_y(g).avg;
  for (int j = -1; j <= n; ++j)
    for (int i = 0; i < n; ++i) flux_y(i, j) *= fy(i, j);
  BulkField out = cell_ops_x(flux_x).diff;
  out += cell_ops_y(flux_y).diff;
  return out;
}

BulkField laplacian_5pt(const GhostField& phi) {
  const int n = phi.n();
  const double inv_h2 = static_cast<double>(n) * n;
  BulkField out(n);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      out(i, j) = (phi(i + 1, j) + phi(i - 1, j) + phi(i, j + 1) + phi(i, j - 1) - 4.0 * phi(i, j)) *
                  inv_h2;
    }
  }
  return out;
}

BoundaryField laplacian_gamma(const BoundaryField& g) {
  const int n = g.n();
  const double inv_h2 = static_cast<double>(n) * n;
  BoundaryField out(n);
  for (int i = 0; i < n; ++i) out[i] = (g[i + 1] - 2.0 * g[i] + g[i - 1]) * inv_h2;
  return out;
}

BoundaryField diff_gamma(const BoundaryField& g) {
  const int n = g.n();
  BoundaryField out(n);
  for (int i = 0; i < n; ++i) out[i] = (g[i + 1] - g[i]) * n;
  return out;
}

BoundaryField boundary_normal_derivative(const GhostField& phi, Side side) {
  const int n = phi.n();
  const double inv_2h = 0.5 * n;
  BoundaryField out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = side == Side::bottom ? (phi(i, 1) - phi(i, -1)) * inv_2h
                                  : (phi(i, n + 1) - phi(i, n - 1)) * inv_2h;
  }
  return out;
}

double inner_omega(const BulkField& f, const BulkField& g) {
  require_same_n(f, g);
  const int n = f.n();
  const double h = 1.0 / n;
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    double row = 0.0;
    for (int i = 0; i < n; ++i) row += f(i, j) * g(i, j);
    sum += row_weight(j, n) * row;
  }
  return h * h * sum;
}

double norm_omega(const BulkField& f) { return std::sqrt(inner_omega(f, f)); }

double inner_gamma(const BoundaryField& f, const BoundaryField& g) {
  require_same_n(f, g);
  double sum = 0.0;
  for (int i = 0; i < f.n(); ++i) sum += f[i] * g[i];
  return sum / f.n();
}

double norm_gamma(const BoundaryField& f) { return std::sqrt(inner_gamma(f, f)); }

double mean_omega(const BulkField& f) {
  const int n = f.n();
  const double h = 1.0 / n;
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    double row = 0.0;
    for (int i = 0; i < n; ++i) row += f(i, j);
    sum += row_weight(j, n) * row;
  }
  return h * h * sum;
}

double mean_gamma(const BoundaryField& f) {
  double sum = 0.0;
  for (int i = 0; i < f.n(); ++i) sum += f[i];
  return sum / f.n();
}

double edge_inner_x(const EdgeFieldX& f, const EdgeFieldX& g) {
  require_same_n(f, g);
  const int n = f.n();
  EdgeFieldX prod(n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) prod(i, j) = f(i, j) * g(i, j);
  return mean_omega(cell_ops_x(prod).avg);
}

double edge_inner_y(const EdgeFieldY& f, const EdgeFieldY& g) {
  require_same_n(f, g);
  const int n = f.n();
  if (!f.has_row(0) || !f.has_row(n - 1) || !g.has_row(0) || !g.has_row(n - 1))
    throw RangeError("y-edge inner product needs faces j+1/2, j = 0..N-1");
  const double h = 1.0 / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    double row = 0.0;
    for (int i = 0; i < n; ++i) row += f(i, j) * g(i, j);
    sum += row;
  }
  return h * h * sum;
}

double edge_inner(const EdgeFieldX& fx, const EdgeFieldY& fy, const EdgeFieldX& gx,
                  const EdgeFieldY& gy) {
  return edge_inner_x(fx, gx) + edge_inner_y(fy, gy);
}

double grad_norm_sq(const GhostField& f) {
  const auto dx = face_ops_x(f).diff;
  const auto dy = face_ops_y(f).diff;
  return edge_inner_x(dx, dx) + edge_inner_y(dy, dy);
}

BoundaryField trace(const BulkField& f, Side side) {
  const int n = f.n();
  const int j = side == Side::bottom ? 0 : n;
  BoundaryField out(n);
  for (int i = 0; i < n; ++i) out[i] = f(i, j);
  return out;
}

void set_trace(BulkField& f, Side side, const BoundaryField& values) {
  require_same_n(f, values);
  const int n = f.n();
  const int j = side == Side::bottom ? 0 : n;
  for (int i = 0; i < n; ++i) f(i, j) = values[i];
}

GhostField with_ghosts(const BulkField& f, const BoundaryField& below, const BoundaryField& above) {
  require_same_n(f, below);
  require_same_n(f, above);
  const int n = f.n();
  GhostField out(n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = f(i, j);
  for (int i = 0; i < n; ++i) {
    out(i, -1) = below[i];
    out(i, n + 1) = above[i];
  }
  return out;
}

GhostField neumann_extension(const BulkField& f) {
  const int n = f.n();
  BoundaryField below(n), above(n);
  for (int i = 0; i < n; ++i) {
    below[i] = f(i, 1);
    above[i] = f(i, n - 1);
  }
  return with_ghosts(f, below, above);
}

BulkField interior(const GhostField& f) {
  const int n = f.n();
  BulkField out(n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = f(i, j);
  return out;
}

}  // namespace fhdbc
