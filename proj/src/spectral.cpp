#include "fhdbc/spectral.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace fhdbc::spectral {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double x_eigenvalue(int k, int n) {
  const double s = std::sin(std::numbers::pi * k / n);
  return 4.0 * static_cast<double>(n) * n * s * s;
}

RowTransform::RowTransform(int n) : n_(n) {
  const int m = mode_count(n);
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(m);
  spec_ = spec;
  plan_fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_inv_) throw Error("FFTW planning failed for N = " + std::to_string(n));
}

RowTransform::~RowTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RowTransform::forward(std::span<const double> x, std::span<Complex> out) {
  std::memcpy(real_, x.data(), sizeof(double) * n_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(out.data(), spec_, sizeof(Complex) * mode_count(n_));
}

void RowTransform::inverse(std::span<const Complex> in, std::span<double> x) {
  const int m = mode_count(n_);
  auto* spec = static_cast<fftw_complex*>(spec_);
  std::memcpy(spec, in.data(), sizeof(Complex) * m);
  // c2r ignores these imaginary parts in exact arithmetic; zero them so the
  // result does not depend on rounding noise in them.
  spec[0][1] = 0.0;
  if (n_ % 2 == 0) spec[m - 1][1] = 0.0;
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  const double inv_n = 1.0 / n_;
  for (int i = 0; i < n_; ++i) x[i] = real_[i] * inv_n;
}

RowTransform& row_transform(int n) {
  thread_local std::map<int, std::unique_ptr<RowTransform>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RowTransform>(n);
  return *slot;
}

ModeField to_modes(const BulkField& f) {
  const int n = f.n();
  const int m = mode_count(n);
  auto& tr = row_transform(n);
  ModeField out(n);
  std::vector<Complex> row(m);
  for (int j = 0; j <= n; ++j) {
    tr.forward(f.row(j), row);
    for (int k = 0; k < m; ++k) out.column(k)[j] = row[k];
  }
  return out;
}

BulkField from_modes(const ModeField& mf) {
  const int n = mf.n();
  const int m = mode_count(n);
  auto& tr = row_transform(n);
  BulkField out(n);
  std::vector<Complex> row(m);
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; k < m; ++k) row[k] = mf.column(k)[j];
    tr.inverse(row, out.row(j));
  }
  return out;
}

Tridiag lh_mode_matrix(int k, int n) {
  const double inv_h2 = static_cast<double>(n) * n;
  const double lam = x_eigenvalue(k, n);
  Tridiag t;
  t.sub.assign(n + 1, -inv_h2);
  t.sup.assign(n + 1, -inv_h2);
  t.diag.assign(n + 1, lam + 2.0 * inv_h2);
  t.sub[0] = 0.0;
  t.sup[n] = 0.0;
  t.sup[0] = -2.0 * inv_h2;
  t.sub[n] = -2.0 * inv_h2;
  return t;
}

void thomas_solve(const Tridiag& t, std::span<Complex> b) {
  const std::size_t m = b.size();
  std::vector<double> c(m);
  double denom = t.diag[0];
  c[0] = t.sup[0] / denom;
  b[0] /= denom;
  for (std::size_t j = 1; j < m; ++j) {
    denom = t.diag[j] - t.sub[j] * c[j - 1];
    c[j] = t.sup[j] / denom;
    b[j] = (b[j] - t.sub[j] * b[j - 1]) / denom;
  }
  for (std::size_t j = m - 1; j-- > 0;) b[j] -= c[j] * b[j + 1];
}

void lh_mode_solve(int k, int n, std::span<Complex> r) {
  Tridiag t = lh_mode_matrix(k, n);
  if (k != 0) {
    thomas_solve(t, r);
    return;
  }
  Tridiag sub;
  sub.sub.assign(t.sub.begin() + 1, t.sub.end());
  sub.diag.assign(t.diag.begin() + 1, t.diag.end());
  sub.sup.assign(t.sup.begin() + 1, t.sup.end());
  sub.sub[0] = 0.0;
  thomas_solve(sub, r.subspan(1));
  r[0] = 0.0;
}

void tridiag_apply(const Tridiag& t, std::span<const Complex> x, std::span<Complex> out) {
  const std::size_t m = x.size();
  for (std::size_t j = 0; j < m; ++j) {
    Complex v = t.diag[j] * x[j];
    if (j > 0) v += t.sub[j] * x[j - 1];
    if (j + 1 < m) v += t.sup[j] * x[j + 1];
    out[j] = v;
  }
}

PentaFactor::PentaFactor(const Tridiag& t, std::span<const double> d, double inv_s, double eps)
    : m_(static_cast<int>(t.diag.size())) {
  constexpr int kl = 2, ku = 2, ldab = 2 * kl + ku + 1;
  ab_.assign(static_cast<std::size_t>(ldab) * m_, 0.0);
  ipiv_.assign(m_, 0);
  work_.assign(static_cast<std::size_t>(2) * m_, 0.0);
  auto a = [&](int r, int c) -> double& {
    return ab_[static_cast<std::size_t>(kl + ku + r - c) + static_cast<std::size_t>(c) * ldab];
  };
  auto tv = [&](int r, int c) -> double {
    if (c < 0 || c >= m_) return 0.0;
    if (c == r) return t.diag[r];
    if (c == r - 1) return t.sub[r];
    if (c == r + 1) return t.sup[r];
    return 0.0;
  };
  for (int r = 0; r < m_; ++r) {
    for (int c = std::max(0, r - 2); c <= std::min(m_ - 1, r + 2); ++c) {
      double v = (r == c) ? inv_s : 0.0;
      v += tv(r, c) * d[c];
      double t2 = 0.0;
      for (int q = std::max(0, r - 1); q <= std::min(m_ - 1, r + 1); ++q) t2 += tv(r, q) * tv(q, c);
      v += eps * t2;
      a(r, c) = v;
    }
  }
  const int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, m_, m_, kl, ku, ab_.data(), ldab, ipiv_.data());
  if (info != 0) throw SolverError("banded preconditioner factorization failed", info);
}

void PentaFactor::solve(std::span<Complex> b) const {
  constexpr int kl = 2, ku = 2, ldab = 2 * kl + ku + 1;
  for (int j = 0; j < m_; ++j) {
    work_[j] = b[j].real();
    work_[m_ + j] = b[j].imag();
  }
  const int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', m_, kl, ku, 2, ab_.data(), ldab, ipiv_.data(),
                                  work_.data(), m_);
  if (info != 0) throw SolverError("banded preconditioner solve failed", info);
  for (int j = 0; j < m_; ++j) b[j] = Complex(work_[j], work_[m_ + j]);
}

}  // namespace fhdbc::spectral
