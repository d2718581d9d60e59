#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fhdbc/grid.hpp"
#include "oracles.hpp"

using namespace fhdbc;

namespace {

constexpr double pi = std::numbers::pi;

GhostField random_ghost(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GhostField g(n);
  for (double& v : g.values()) v = u(rng);
  return g;
}

/// Ghosted field sampled from fn on rows -1..N+1.
template <class Fn>
GhostField sample_ghost(int n, Fn&& fn) {
  GhostField g(n);
  const double h = 1.0 / n;
  for (int j = -1; j <= n + 1; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = fn(i * h, j * h);
  return g;
}

}  // namespace

TEST(GridParams, ValidatesSize) {
  EXPECT_NO_THROW(GridParams::make(4));
  EXPECT_DOUBLE_EQ(GridParams::make(8).h, 0.125);
  EXPECT_THROW(GridParams::make(2), RangeError);
  EXPECT_THROW(GridParams::make(7), RangeError);
}

TEST(Fields, PeriodicAccessWraps) {
  BulkField f(4);
  f(1, 2) = 3.5;
  EXPECT_EQ(f(5, 2), 3.5);
  EXPECT_EQ(f(-3, 2), 3.5);
  BoundaryField b(4);
  b[3] = 2.0;
  EXPECT_EQ(b[-1], 2.0);
}

TEST(Fields, ShapeMismatchIsRejected) {
  BulkField a(4), b(8);
  EXPECT_THROW(a += b, RangeError);
}

TEST(FaceOps, ConstantField) {
  const auto fx = face_ops_x(BulkField(8, 1.0));
  EXPECT_EQ(fx.avg.max_abs(), 1.0);
  EXPECT_EQ(fx.diff.max_abs(), 0.0);
  const auto fy = face_ops_y(GhostField(8, 1.0));
  EXPECT_EQ(fy.avg.max_abs(), 1.0);
  EXPECT_EQ(fy.diff.max_abs(), 0.0);
}

TEST(FaceOps, HandEvaluatedWrap) {
  // Row [0, 1, 0, 1] on N = 4: differences alternate +-4 including the wrap.
  BulkField f(4);
  for (int j = 0; j <= 4; ++j) {
    f(1, j) = 1.0;
    f(3, j) = 1.0;
  }
  const auto fx = face_ops_x(f);
  EXPECT_DOUBLE_EQ(fx.diff(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(fx.diff(1, 0), -4.0);
  EXPECT_DOUBLE_EQ(fx.diff(3, 0), -4.0);
  EXPECT_DOUBLE_EQ(fx.avg(3, 2), 0.5);
}

TEST(FaceOps, CosineDifferenceIdentity) {
  const int n = 16;
  const double h = 1.0 / n;
  const BulkField f = sample(n, [](double x, double) { return std::cos(2 * pi * x); });
  const auto fx = face_ops_x(f);
  for (int i = 0; i < n; ++i) {
    const double expect = -(2.0 / h) * std::sin(pi * h) * std::sin(2 * pi * (i + 0.5) * h);
    EXPECT_NEAR(fx.diff(i, 3), expect, 1e-12);
  }
}

TEST(FaceOps, LinearInYAndGhostDifference) {
  const int n = 8;
  const GhostField f = sample_ghost(n, [](double, double y) { return y; });
  const auto fy = face_ops_y(f);
  for (int j = -1; j <= n; ++j) EXPECT_NEAR(fy.diff(2, j), 1.0, 1e-13);

  std::mt19937_64 rng(5);
  const GhostField g = random_ghost(n, rng);
  const auto gy = face_ops_y(g);
  EXPECT_NEAR(gy.diff(1, -1), (g(1, 0) - g(1, -1)) * n, 1e-13);
}

TEST(CellOps, ConstantAndComposition) {
  const int n = 4;
  const auto c = cell_ops_x(EdgeFieldX(n, 2.5));
  EXPECT_NEAR((c.avg - BulkField(n, 2.5)).max_abs(), 0.0, 1e-15);
  EXPECT_EQ(c.diff.max_abs(), 0.0);

  std::mt19937_64 rng(7);
  const BulkField f = oracle::random_field(n, rng);
  const auto fx = face_ops_x(f);
  const auto dd = cell_ops_x(fx.diff);
  const auto aa = cell_ops_x(fx.avg);
  const double h2 = 1.0 / (n * n);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(dd.diff(i, j), (f(i + 1, j) - 2 * f(i, j) + f(i - 1, j)) / h2, 1e-12);
      EXPECT_NEAR(aa.avg(i, j), (f(i + 1, j) + 2 * f(i, j) + f(i - 1, j)) / 4, 1e-15);
    }
  }
}

TEST(CellOps, RejectsPlainYEdges) { EXPECT_THROW(cell_ops_y(EdgeFieldY(4, false)), RangeError); }

TEST(Divergence, ConstantVectorAndScaling) {
  const int n = 8;
  EXPECT_LT(divergence(GhostField(n, 1.0), EdgeFieldX(n, 0.3), EdgeFieldY(n, true, -1.2)).max_abs(), 1e-13);

  std::mt19937_64 rng(11);
  const GhostField phi = random_ghost(n, rng);
  const auto gx = face_ops_x(phi);
  const auto gy = face_ops_y(phi);
  const BulkField div1 = divergence(GhostField(n, 1.0), gx.diff, gy.diff);
  const BulkField lap = laplacian_5pt(phi);
  EXPECT_LE((div1 - lap).max_abs(), 1e-14 * (1.0 + lap.max_abs()));
  const BulkField div2 = divergence(GhostField(n, 2.0), gx.diff, gy.diff);
  EXPECT_LE((div2 - 2.0 * lap).max_abs(), 1e-14 * (1.0 + lap.max_abs()));
}

TEST(Laplacian, CosineEigenvalue) {
  const int n = 16;
  const double h = 1.0 / n;
  const GhostField phi = sample_ghost(n, [](double x, double) { return std::cos(2 * pi * x); });
  const BulkField lap = laplacian_5pt(phi);
  const double lambda = 4.0 / (h * h) * std::pow(std::sin(pi * h), 2);
  EXPECT_LE((lap + lambda * interior(phi)).max_abs(), 1e-10);
  EXPECT_LT(laplacian_5pt(GhostField(n, 3.0)).max_abs(), 1e-12);
}

TEST(Laplacian, MatchesDenseStencil) {
  const int n = 6;
  std::mt19937_64 rng(13);
  const GhostField phi = random_ghost(n, rng);
  // Dense operator on the ghosted layout, rows -1..N+1.
  const int rows = n + 3;
  oracle::Mat a = oracle::Mat::Zero(n * (n + 1), n * rows);
  oracle::Vec x(n * rows);
  const double c = double(n) * n;
  for (int j = -1; j <= n + 1; ++j)
    for (int i = 0; i < n; ++i) x((j + 1) * n + i) = phi(i, j);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int r = j * n + i;
      a(r, (j + 1) * n + i) -= 4 * c;
      a(r, (j + 1) * n + (i + 1) % n) += c;
      a(r, (j + 1) * n + (i + n - 1) % n) += c;
      a(r, (j + 2) * n + i) += c;
      a(r, j * n + i) += c;
    }
  }
  const oracle::Vec ref = a * x;
  const BulkField lap = laplacian_5pt(phi);
  EXPECT_LE((oracle::to_vec(lap) - ref).lpNorm<Eigen::Infinity>(), 1e-12 * ref.lpNorm<Eigen::Infinity>());
}

TEST(LaplacianGamma, Examples) {
  const int n = 4;
  EXPECT_EQ(laplacian_gamma(BoundaryField(n, 2.0)).max_abs(), 0.0);
  BoundaryField g(n);
  g[0] = 1.0;
  g[2] = -1.0;
  const BoundaryField lg = laplacian_gamma(g);
  for (int i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(lg[i], -2.0 * n * n * g[i]);

  const int m = 16;
  BoundaryField c(m);
  for (int i = 0; i < m; ++i) c[i] = std::cos(2 * pi * i / m);
  const double lambda = 4.0 * m * m * std::pow(std::sin(pi / m), 2);
  EXPECT_LE((laplacian_gamma(c) + lambda * c).max_abs(), 1e-10);
}

TEST(NormalDerivative, Examples) {
  const int n = 8;
  const GhostField lin = sample_ghost(n, [](double, double y) { return y; });
  EXPECT_NEAR((boundary_normal_derivative(lin, Side::bottom) - BoundaryField(n, 1.0)).max_abs(), 0.0, 1e-13);
  EXPECT_NEAR((boundary_normal_derivative(lin, Side::top) - BoundaryField(n, 1.0)).max_abs(), 0.0, 1e-13);

  std::mt19937_64 rng(17);
  const BulkField f = oracle::random_field(n, rng);
  EXPECT_EQ(boundary_normal_derivative(neumann_extension(f), Side::bottom).max_abs(), 0.0);
  EXPECT_EQ(boundary_normal_derivative(neumann_extension(f), Side::top).max_abs(), 0.0);

  const GhostField g = random_ghost(4, rng);
  const auto gy = face_ops_y(g);
  const auto ay = cell_ops_y(gy.diff);
  const BoundaryField dn = boundary_normal_derivative(g, Side::bottom);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(dn[i], ay.avg(i, 0), 1e-13);
}

TEST(InnerProducts, Weights) {
  const int n = 8;
  const double h = 1.0 / n;
  EXPECT_NEAR(inner_omega(BulkField(n, 1.0), BulkField(n, 1.0)), 1.0, 1e-14);
  BulkField one_hot(n);
  one_hot(3, 4) = 2.0;
  EXPECT_NEAR(inner_omega(BulkField(n, 1.0), one_hot), h * h * 2.0, 1e-16);
  BulkField edge_hot(n);
  edge_hot(3, 0) = 2.0;
  EXPECT_NEAR(inner_omega(BulkField(n, 1.0), edge_hot), h * h, 1e-16);

  EXPECT_NEAR(inner_gamma(BoundaryField(n, 1.0), BoundaryField(n, 1.0)), 1.0, 1e-15);
  BoundaryField b(n);
  b[5] = 3.0;
  EXPECT_NEAR(inner_gamma(BoundaryField(n, 1.0), b), 3.0 * h, 1e-16);

  std::mt19937_64 rng(19);
  BoundaryField r(n);
  std::uniform_real_distribution<double> u(-1, 1);
  double direct = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = u(rng);
    direct += h * r[i] * r[i];
  }
  EXPECT_NEAR(norm_gamma(r) * norm_gamma(r), direct, 1e-15);
}

TEST(InnerProducts, GradientNormOfCosine) {
  const int n = 16;
  const double h = 1.0 / n;
  const GhostField c = sample_ghost(n, [](double x, double) { return std::cos(2 * pi * x); });
  EXPECT_EQ(grad_norm_sq(GhostField(n, 4.0)), 0.0);
  double direct = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double d = (c(i + 1, j) - c(i, j)) / h;
      direct += h * h * ((j == 0 || j == n) ? 0.5 : 1.0) * d * d;
    }
  }
  EXPECT_NEAR(grad_norm_sq(c), direct, 1e-10 * direct);
  // Each row contributes (4/h^2) sin^2(pi h) * h * sum cos^2 = (4/h^2) sin^2(pi h) / 2.
  const double lambda = 4.0 / (h * h) * std::pow(std::sin(pi * h), 2);
  EXPECT_NEAR(grad_norm_sq(c), lambda * 0.5, 1e-10 * lambda);
}

TEST(Sbp, LaplacianIdentityAgainstDirectSums) {
  for (int n : {4, 8}) {
    std::mt19937_64 rng(23 + n);
    const GhostField psi = random_ghost(n, rng);
    const GhostField phi = random_ghost(n, rng);
    const double h = 1.0 / n;
    // Every term written out from the index formulas.
    double lhs = 0.0, gx = 0.0, gy = 0.0, top = 0.0, bot = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      for (int i = 0; i < n; ++i) {
        const double lap = (phi(i + 1, j) + phi(i - 1, j) + phi(i, j + 1) + phi(i, j - 1) - 4 * phi(i, j)) / (h * h);
        lhs += h * h * w * psi(i, j) * lap;
        const double ex = (psi(i + 1, j) - psi(i, j)) * (phi(i + 1, j) - phi(i, j)) / (h * h);
        const double exm = (psi(i, j) - psi(i - 1, j)) * (phi(i, j) - phi(i - 1, j)) / (h * h);
        gx += h * h * w * 0.5 * (ex + exm);
      }
    }
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) gy += (psi(i, j + 1) - psi(i, j)) * (phi(i, j + 1) - phi(i, j));
    for (int i = 0; i < n; ++i) {
      top += h * psi(i, n) * (phi(i, n + 1) - phi(i, n - 1)) / (2 * h);
      bot += h * psi(i, 0) * (phi(i, 1) - phi(i, -1)) / (2 * h);
    }
    const double defect = lhs + gx + gy - top + bot;
    EXPECT_LE(std::abs(defect), 1e-12 * (std::abs(lhs) + gx + std::abs(gy) + std::abs(top) + std::abs(bot)));
    // The library's bracket reproduces the direct gradient sum.
    const double lib = edge_inner(face_ops_x(psi).diff, face_ops_y(psi).diff, face_ops_x(phi).diff,
                                  face_ops_y(phi).diff);
    EXPECT_NEAR(lib, gx + gy, 1e-12 * (std::abs(gx) + std::abs(gy)));
    EXPECT_NEAR(inner_omega(interior(psi), laplacian_5pt(phi)), lhs, 1e-12 * std::abs(lhs) + 1e-12);
  }
}

TEST(Operators, Linearity) {
  const int n = 8;
  std::mt19937_64 rng(29);
  const GhostField f = random_ghost(n, rng);
  const GhostField g = random_ghost(n, rng);
  const double a = 0.37, b = -1.9;
  const GhostField comb = a * f + b * g;
  const BulkField lhs = laplacian_5pt(comb);
  const BulkField rhs = a * laplacian_5pt(f) + b * laplacian_5pt(g);
  EXPECT_LE((lhs - rhs).max_abs(), 1e-13 * lhs.max_abs());
  const auto dl = face_ops_y(comb).diff;
  const auto dr = a * face_ops_y(f).diff + b * face_ops_y(g).diff;
  EXPECT_LE((dl - dr).max_abs(), 1e-13 * dl.max_abs());
}

TEST(Traces, SetAndRead) {
  BulkField f(4);
  BoundaryField b(4, 0.25);
  set_trace(f, Side::top, b);
  EXPECT_EQ(trace(f, Side::top)[2], 0.25);
  EXPECT_EQ(trace(f, Side::bottom).max_abs(), 0.0);
  const GhostField g = with_ghosts(f, BoundaryField(4, 1.0), BoundaryField(4, 2.0));
  EXPECT_EQ(g(1, -1), 1.0);
  EXPECT_EQ(g(1, 5), 2.0);
  EXPECT_EQ(interior(g)(1, 4), 0.25);
}
