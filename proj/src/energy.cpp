#include "fhdbc/energy.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace fhdbc {

void ModelParams::validate() const {
  auto need_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << name << " must be a finite positive number, got " << v;
      throw ConfigError(msg.str());
    }
  };
  need_positive(eps, "eps");
  need_positive(kappa, "kappa");
  need_positive(theta0, "theta0");
  need_positive(s, "dt");
}

FhValues fh_potential(double x) {
  if (!(std::abs(x) < 1.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Flory-Huggins potential evaluated at |x| >= 1 (x = " << x << ")";
    throw DomainError(msg.str());
  }
  const double lp = std::log1p(x);
  const double lm = std::log1p(-x);
  return {(1.0 + x) * lp + (1.0 - x) * lm, lp - lm, 1.0 / (1.0 + x) + 1.0 / (1.0 - x)};
}

void require_admissible(const BulkField& phi) {
  for (double v : phi.values()) {
    if (!(std::abs(v) < 1.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "phase field left (-1, 1): value " << v;
      throw DomainError(msg.str());
    }
  }
}

namespace {

BulkField map_potential(const BulkField& phi, int which) {
  BulkField out(phi.n());
  auto src = phi.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < src.size(); ++k) {
    const FhValues v = fh_potential(src[k]);
    dst[k] = which == 0 ? v.value : (which == 1 ? v.d1 : v.d2);
  }
  return out;
}

double gamma_sum(const BulkField& f, int j) {
  double s = 0.0;
  for (double v : f.row(j)) s += v;
  return s / f.n();
}

double gamma_dot(const BulkField& f, const BulkField& g, int j) {
  const auto a = f.row(j);
  const auto b = g.row(j);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / f.n();
}

/// <g, -Delta_h^x g>_Gamma = ||D_x g||^2_Gamma.
double surface_gradient_sq(const BulkField& f, int j) {
  const int n = f.n();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (f(i + 1, j) - f(i, j)) * n;
    s += d * d;
  }
  return s / n;
}

}  // namespace

double total_energy(const BulkField& phi, const ModelParams& p, BoundaryMode mode) {
  const int n = phi.n();
  const BulkField iv = map_potential(phi, 0);
  double pot = mean_omega(iv);
  double quad = inner_omega(phi, phi);
  double surf = 0.0;
  if (mode == BoundaryMode::dynamic) {
    pot += gamma_sum(iv, 0) + gamma_sum(iv, n);
    quad += gamma_dot(phi, phi, 0) + gamma_dot(phi, phi, n);
    surf = surface_gradient_sq(phi, 0) + surface_gradient_sq(phi, n);
  }
  return pot / p.eps - 0.5 * p.theta0 / p.eps * quad + 0.5 * p.eps * inner_omega(phi, apply_Lh(phi)) +
         0.5 * p.kappa * surf;
}

StepProblem::StepProblem(BulkField phi_n, const ModelParams& p, BoundaryMode mode)
    : phi_n_(std::move(phi_n)), p_(p), mode_(mode) {
  p_.validate();
}

void StepProblem::require_compatible(const BulkField& phi) const {
  if (!phi.same_shape(phi_n_)) throw RangeError("step functional: grid size mismatch");
  const MassTriple a = masses(phi);
  const MassTriple b = masses(phi_n_);
  const double tol = 1e-10;
  bool ok = std::abs(a.bulk - b.bulk) <= tol;
  if (mode_ == BoundaryMode::dynamic)
    ok = ok && std::abs(a.bottom - b.bottom) <= tol && std::abs(a.top - b.top) <= tol;
  if (!ok) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "mass-incompatible iterate: mean differences (" << a.bulk - b.bulk << ", " << a.bottom - b.bottom
        << ", " << a.top - b.top << ")";
    throw CompatibilityError(msg.str());
  }
}

double StepProblem::functional(const BulkField& phi) const {
  require_compatible(phi);
  const int n = this->n();
  const double inv_s = 1.0 / p_.s;
  const double inv_eps = 1.0 / p_.eps;
  BulkField delta = phi - phi_n_;
  const BulkField iv = map_potential(phi, 0);

  double f = 0.5 * inv_s * inner_omega(delta, detail::lh_pinv(delta));
  double pot = mean_omega(iv);
  double lin = inner_omega(phi_n_, phi);
  double surf = 0.0;
  if (mode_ == BoundaryMode::dynamic) {
    for (Side side : {Side::bottom, Side::top}) {
      const BoundaryField db = trace(delta, side);
      f += 0.5 * inv_s * inner_gamma(db, detail::neg_lap_gamma_pinv(db));
    }
    pot += gamma_sum(iv, 0) + gamma_sum(iv, n);
    lin += gamma_dot(phi_n_, phi, 0) + gamma_dot(phi_n_, phi, n);
    surf = surface_gradient_sq(phi, 0) + surface_gradient_sq(phi, n);
  }
  f += inv_eps * pot + 0.5 * p_.eps * inner_omega(phi, apply_Lh(phi)) + 0.5 * p_.kappa * surf -
       inv_eps * p_.theta0 * lin;
  return f;
}

BulkField StepProblem::scaled_gradient(const BulkField& phi) const {
  const int n = this->n();
  const double inv_s = 1.0 / p_.s;
  const double inv_eps = 1.0 / p_.eps;
  BulkField delta = phi - phi_n_;
  const BulkField d1 = map_potential(phi, 1);

  BulkField r = inv_s * detail::lh_pinv(delta);
  r.axpy(inv_eps, d1);
  r.axpy(p_.eps, apply_Lh(phi));
  r.axpy(-inv_eps * p_.theta0, phi_n_);
  if (mode_ == BoundaryMode::dynamic) {
    const double two_over_h = 2.0 * n;
    for (Side side : {Side::bottom, Side::top}) {
      const int j = side == Side::bottom ? 0 : n;
      const BoundaryField inv = detail::neg_lap_gamma_pinv(trace(delta, side));
      const BoundaryField lap = laplacian_gamma(trace(phi, side));
      for (int i = 0; i < n; ++i) {
        const double e = inv_s * inv[i] + inv_eps * (d1(i, j) - p_.theta0 * phi_n_(i, j)) - p_.kappa * lap[i];
        r(i, j) += two_over_h * e;
      }
    }
  }
  return r;
}

BulkField StepProblem::gradient(const BulkField& phi) const {
  BulkField g = scaled_gradient(phi);
  const int n = this->n();
  const double h2 = 1.0 / (static_cast<double>(n) * n);
  for (int j = 0; j <= n; ++j)
    for (double& v : g.row(j)) v *= h2 * row_weight(j, n);
  return g;
}

BulkField StepProblem::scaled_hessian_apply(const BulkField& phi, const BulkField& d) const {
  const int n = this->n();
  const double inv_s = 1.0 / p_.s;
  const double inv_eps = 1.0 / p_.eps;
  const BulkField d2 = map_potential(phi, 2);

  BulkField r = inv_s * detail::lh_pinv(d);
  r.axpy(p_.eps, apply_Lh(d));
  {
    auto rv = r.values();
    auto dv = d.values();
    auto cv = d2.values();
    for (std::size_t k = 0; k < rv.size(); ++k) rv[k] += inv_eps * cv[k] * dv[k];
  }
  if (mode_ == BoundaryMode::dynamic) {
    const double two_over_h = 2.0 * n;
    for (Side side : {Side::bottom, Side::top}) {
      const int j = side == Side::bottom ? 0 : n;
      const BoundaryField db = trace(d, side);
      const BoundaryField inv = detail::neg_lap_gamma_pinv(db);
      const BoundaryField lap = laplacian_gamma(db);
      for (int i = 0; i < n; ++i) {
        const double e = inv_s * inv[i] + inv_eps * d2(i, j) * db[i] - p_.kappa * lap[i];
        r(i, j) += two_over_h * e;
      }
    }
  }
  return r;
}

BulkField StepProblem::hessian_apply(const BulkField& phi, const BulkField& d) const {
  BulkField g = scaled_hessian_apply(phi, d);
  const int n = this->n();
  const double h2 = 1.0 / (static_cast<double>(n) * n);
  for (int j = 0; j <= n; ++j)
    for (double& v : g.row(j)) v *= h2 * row_weight(j, n);
  return g;
}

void StepProblem::project(BulkField& v) const {
  if (mode_ == BoundaryMode::dynamic)
    remove_constant_mass_part(v);
  else
    remove_bulk_mean(v);
}

double StepProblem::natural_norm(const BulkField& scaled) const {
  const int n = this->n();
  const double half_h = 0.5 / n;
  double m = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double w = (mode_ == BoundaryMode::dynamic && (j == 0 || j == n)) ? half_h : 1.0;
    for (double v : scaled.row(j)) m = std::max(m, w * std::abs(v));
  }
  return m;
}

double step_functional(const BulkField& phi, const BulkField& phi_n, const ModelParams& p, BoundaryMode mode) {
  return StepProblem(phi_n, p, mode).functional(phi);
}

BulkField step_gradient(const BulkField& phi, const BulkField& phi_n, const ModelParams& p, BoundaryMode mode) {
  return StepProblem(phi_n, p, mode).gradient(phi);
}

BulkField hessian_apply(const BulkField& phi, const ModelParams& p, const BulkField& d, BoundaryMode mode) {
  return StepProblem(phi, p, mode).hessian_apply(phi, d);
}

}  // namespace fhdbc
