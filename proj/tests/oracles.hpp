#pragma once

// Dense reference implementations assembled entry by entry from the
// definitions. They share nothing with the library beyond the field
// containers, and are meant for N <= 16.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fhdbc/energy.hpp"
#include "fhdbc/grid.hpp"

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using fhdbc::BoundaryMode;
using fhdbc::BulkField;
using fhdbc::ModelParams;

inline int idx(int i, int j, int n) { return j * n + ((i % n) + n) % n; }
inline int size(int n) { return n * (n + 1); }

inline Vec to_vec(const BulkField& f) {
  const int n = f.n();
  Vec v(size(n));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) v(idx(i, j, n)) = f(i, j);
  return v;
}

inline BulkField from_vec(const Vec& v, int n) {
  BulkField f(n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) f(i, j) = v(idx(i, j, n));
  return f;
}

inline BulkField random_field(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  BulkField f(n);
  for (double& x : f.values()) x = u(rng);
  return f;
}

/// Quadrature weights h^2 w_j.
inline Vec omega_weights(int n) {
  const double h = 1.0 / n;
  Vec w(size(n));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) w(idx(i, j, n)) = h * h * ((j == 0 || j == n) ? 0.5 : 1.0);
  return w;
}

/// L_h: minus the five-point Laplacian with even reflection in y.
inline Mat lh(int n) {
  const double c = double(n) * n;
  Mat L = Mat::Zero(size(n), size(n));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int r = idx(i, j, n);
      L(r, r) += 4.0 * c;
      L(r, idx(i + 1, j, n)) -= c;
      L(r, idx(i - 1, j, n)) -= c;
      const int up = j == n ? n - 1 : j + 1;
      const int dn = j == 0 ? 1 : j - 1;
      L(r, idx(i, up, n)) -= c;
      L(r, idx(i, dn, n)) -= c;
    }
  }
  return L;
}

/// Symmetric pseudo-inverse of a symmetric positive semidefinite matrix
/// with a one-dimensional kernel.
inline Mat psd_pinv(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Vec inv = es.eigenvalues();
  const double top = inv.cwiseAbs().maxCoeff();
  for (int k = 0; k < inv.size(); ++k) inv(k) = std::abs(inv(k)) > 1e-10 * top ? 1.0 / inv(k) : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// K = W L_h^+, the Gram matrix of the -1 inner product on mean-zero data.
inline Mat minus1_gram(int n) {
  const Vec w = omega_weights(n);
  const Vec sw = w.cwiseSqrt();
  const Mat s = sw.asDiagonal() * lh(n) * sw.cwiseInverse().asDiagonal();
  const Mat sym = 0.5 * (s + s.transpose());
  return sw.asDiagonal() * psd_pinv(sym) * sw.asDiagonal();
}

/// Mean-zero solution of L_h x = r for mean-zero r.
inline Vec lh_solve(const Vec& r, int n) {
  return omega_weights(n).cwiseInverse().asDiagonal() * (minus1_gram(n) * r);
}

/// Periodic -Delta_h^x on one row.
inline Mat neg_lap_x(int n) {
  const double c = double(n) * n;
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 * c;
    a(i, (i + 1) % n) -= c;
    a(i, (i + n - 1) % n) -= c;
  }
  return a;
}

inline Vec row_of(const Vec& v, int j, int n) { return v.segment(j * n, n); }

inline double fh(double x) { return (1 + x) * std::log(1 + x) + (1 - x) * std::log(1 - x); }
inline double fh1(double x) { return std::log(1 + x) - std::log(1 - x); }
inline double fh2(double x) { return 1.0 / (1 + x) + 1.0 / (1 - x); }

/// Nodal weights of the potential terms: h^2 w_j plus h on the physical rows
/// when the surface energy is present.
inline Vec potential_weights(int n, BoundaryMode mode) {
  Vec w = omega_weights(n);
  if (mode == BoundaryMode::dynamic) {
    for (int i = 0; i < n; ++i) {
      w(idx(i, 0, n)) += 1.0 / n;
      w(idx(i, n, n)) += 1.0 / n;
    }
  }
  return w;
}

/// Embeds h * A (A acting on one row) into the rows 0 and N blocks.
inline Mat boundary_blocks(const Mat& a, int n) {
  Mat out = Mat::Zero(size(n), size(n));
  for (int j : {0, n}) out.block(j * n, j * n, n, n) += a / n;
  return out;
}

inline double energy(const BulkField& phi, const ModelParams& p, BoundaryMode mode) {
  const int n = phi.n();
  const Vec x = to_vec(phi);
  const Vec pw = potential_weights(n, mode);
  double e = 0.0;
  for (int k = 0; k < x.size(); ++k) e += pw(k) * (fh(x(k)) / p.eps - 0.5 * p.theta0 / p.eps * x(k) * x(k));
  e += 0.5 * p.eps * x.dot(omega_weights(n).asDiagonal() * (lh(n) * x));
  if (mode == BoundaryMode::dynamic) e += 0.5 * p.kappa * x.dot(boundary_blocks(neg_lap_x(n), n) * x);
  return e;
}

/// The per-step functional: the convex part of the energy plus (1/2s) times
/// the squared -1 norms of the increments, minus the explicit concave term.
struct StepOracle {
  int n;
  ModelParams p;
  BoundaryMode mode;
  Vec xn;
  Vec pw;
  Mat quad;   // constant part of the Hessian
  Mat gram;   // (1/s) -1 Gram matrices

  StepOracle(const BulkField& phi_n, const ModelParams& p_, BoundaryMode m) : n(phi_n.n()), p(p_), mode(m) {
    xn = to_vec(phi_n);
    pw = potential_weights(n, mode);
    gram = minus1_gram(n) / p.s;
    Mat elastic = p.eps * omega_weights(n).asDiagonal() * lh(n);
    if (mode == BoundaryMode::dynamic) {
      gram += boundary_blocks(psd_pinv(neg_lap_x(n)), n) / p.s;
      elastic += p.kappa * boundary_blocks(neg_lap_x(n), n);
    }
    quad = gram + elastic;
  }

  double value(const Vec& x) const {
    const Vec d = x - xn;
    const Mat elastic = quad - gram;
    double f = 0.5 * d.dot(gram * d) + 0.5 * x.dot(elastic * x);
    for (int k = 0; k < x.size(); ++k) f += pw(k) * (fh(x(k)) - p.theta0 * xn(k) * x(k)) / p.eps;
    return f;
  }

  Vec gradient(const Vec& x) const {
    const Mat elastic = quad - gram;
    Vec g = gram * (x - xn) + elastic * x;
    for (int k = 0; k < x.size(); ++k) g(k) += pw(k) * (fh1(x(k)) - p.theta0 * xn(k)) / p.eps;
    return g;
  }

  Mat hessian(const Vec& x) const {
    Mat hm = quad;
    for (int k = 0; k < x.size(); ++k) hm(k, k) += pw(k) * fh2(x(k)) / p.eps;
    return hm;
  }

  /// Rows are the mass functionals: bulk, then bottom and top in dynamic mode.
  Mat constraints() const {
    const int m = mode == BoundaryMode::dynamic ? 3 : 1;
    Mat a = Mat::Zero(m, size(n));
    a.row(0) = omega_weights(n).transpose();
    if (m == 3) {
      for (int i = 0; i < n; ++i) {
        a(1, idx(i, 0, n)) = 1.0 / n;
        a(2, idx(i, n, n)) = 1.0 / n;
      }
    }
    return a;
  }

  /// KKT multipliers lambda with gradient = A^T lambda at a stationary point.
  Vec multipliers(const Vec& x) const {
    const Mat a = constraints();
    return (a * a.transpose()).ldlt().solve(a * gradient(x));
  }

  /// Damped Newton on the KKT system from x0 = phi^n.
  Vec solve(int max_iter = 100) const {
    const Mat a = constraints();
    const int m = static_cast<int>(a.rows());
    const int sz = size(n);
    Vec x = xn;
    for (int it = 0; it < max_iter; ++it) {
      Mat kkt = Mat::Zero(sz + m, sz + m);
      kkt.topLeftCorner(sz, sz) = hessian(x);
      kkt.topRightCorner(sz, m) = a.transpose();
      kkt.bottomLeftCorner(m, sz) = a;
      Vec rhs = Vec::Zero(sz + m);
      rhs.head(sz) = -gradient(x);
      const Vec sol = kkt.partialPivLu().solve(rhs);
      const Vec d = sol.head(sz);
      double t = 1.0;
      for (int k = 0; k < sz; ++k) {
        if (d(k) > 0) t = std::min(t, 0.9 * (1.0 - x(k)) / d(k));
        if (d(k) < 0) t = std::min(t, 0.9 * (-1.0 - x(k)) / d(k));
      }
      const double f0 = value(x);
      const double slope = gradient(x).dot(d);
      while (t > 1e-12 && value(x + t * d) > f0 + 1e-4 * t * slope) t *= 0.5;
      x += t * d;
      if (t == 1.0 && d.lpNorm<Eigen::Infinity>() < 1e-14) break;
    }
    return x;
  }
};

}  // namespace oracle
