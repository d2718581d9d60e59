#include "fhdbc/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fhdbc/spectral.hpp"

namespace fhdbc {

namespace sp = spectral;

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
  if (max_newton < 1) fail("max_newton must be at least 1");
  if (!(linear_tol > 0.0)) fail("linear_tol must be positive");
  if (max_linear < 1) fail("max_linear must be at least 1");
  if (!(fraction_to_boundary > 0.0 && fraction_to_boundary < 1.0))
    fail("fraction_to_boundary must lie strictly between 0 and 1");
  if (!(armijo_c > 0.0 && armijo_c < 0.5)) fail("armijo_c must lie in (0, 0.5)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) fail("backtrack_factor must lie in (0, 1)");
  if (max_backtracks < 1) fail("max_backtracks must be at least 1");
}

double SchemeResidual::max() const {
  return std::max({update, potential, mu_neumann, surface_update_b, surface_potential_b, surface_update_t,
                   surface_potential_t});
}

namespace {

constexpr double kBoundaryMargin = 1e-13;

/// Translation-invariant model of the Newton Hessian: the I'' coefficient is
/// replaced by its row average, which makes every x-mode decouple into a
/// pentadiagonal system in y.
class ModePreconditioner {
 public:
  ModePreconditioner(const StepProblem& prob, const BulkField& phi) : n_(prob.n()) {
    const int n = n_;
    const ModelParams& p = prob.params();
    const double inv_s = 1.0 / p.s;
    const double two_over_h = 2.0 * n;
    std::vector<double> c(n + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
      double sum = 0.0;
      for (double v : phi.row(j)) sum += fh_potential(v).d2;
      c[j] = sum / (n * p.eps);
    }
    const int m = sp::mode_count(n);
    tri_.reserve(m);
    fac_.reserve(m);
    for (int k = 0; k < m; ++k) {
      tri_.push_back(sp::lh_mode_matrix(k, n));
      std::vector<double> d = c;
      if (prob.mode() == BoundaryMode::dynamic) {
        const double lam = sp::x_eigenvalue(k, n);
        const double inv_part = k == 0 ? 0.0 : inv_s / lam;
        d[0] += two_over_h * (c[0] + p.kappa * lam + inv_part);
        d[n] += two_over_h * (c[n] + p.kappa * lam + inv_part);
      }
      fac_.emplace_back(tri_.back(), d, inv_s, p.eps);
    }
  }

  BulkField apply(const BulkField& r) const {
    sp::ModeField modes = sp::to_modes(r);
    std::vector<sp::Complex> tmp(n_ + 1);
    for (int k = 0; k < sp::mode_count(n_); ++k) {
      auto col = modes.column(k);
      sp::tridiag_apply(tri_[k], col, tmp);
      fac_[k].solve(tmp);
      std::copy(tmp.begin(), tmp.end(), col.begin());
    }
    return sp::from_modes(modes);
  }

 private:
  int n_;
  std::vector<sp::Tridiag> tri_;
  std::vector<sp::PentaFactor> fac_;
};

/// Preconditioned CG in <.,.>_Omega on the constraint tangent space for
/// P J d = rhs. Stops on relative residual or once the residual is far below
/// the Newton tolerance in natural units.
BulkField pcg(const StepProblem& prob, const BulkField& phi, const BulkField& rhs, const SolverConfig& cfg,
              int& iters) {
  const ModePreconditioner pc(prob, phi);
  BulkField x(prob.n());
  BulkField r = rhs;
  prob.project(r);
  const double r0 = std::sqrt(inner_omega(r, r));
  if (r0 == 0.0) return x;
  BulkField z = pc.apply(r);
  prob.project(z);
  BulkField p = z;
  double rz = inner_omega(r, z);
  const double floor = 1e-2 * cfg.newton_tol;
  for (int it = 0; it < cfg.max_linear; ++it) {
    BulkField ap = prob.scaled_hessian_apply(phi, p);
    prob.project(ap);
    const double pap = inner_omega(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    ++iters;
    if (std::sqrt(inner_omega(r, r)) <= cfg.linear_tol * r0 || prob.natural_norm(r) <= floor) break;
    z = pc.apply(r);
    prob.project(z);
    const double rz_new = inner_omega(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    p *= beta;
    p += z;
  }
  prob.project(x);
  return x;
}

double max_step_to_boundary(const BulkField& phi, const BulkField& d) {
  const double lim = 1.0 - kBoundaryMargin;
  double t = std::numeric_limits<double>::infinity();
  auto pv = phi.values();
  auto dv = d.values();
  for (std::size_t k = 0; k < pv.size(); ++k) {
    if (dv[k] > 0.0)
      t = std::min(t, (lim - pv[k]) / dv[k]);
    else if (dv[k] < 0.0)
      t = std::min(t, (-lim - pv[k]) / dv[k]);
  }
  return std::max(t, 0.0);
}

void restore_masses(const StepProblem& prob, BulkField& phi) {
  BulkField drift = phi - prob.phi_n();
  BulkField kept = drift;
  prob.project(kept);
  drift -= kept;
  phi -= drift;
}

Multipliers multipliers_from(const StepProblem& prob, const BulkField& scaled) {
  if (prob.mode() == BoundaryMode::neumann) return {-mean_omega(scaled), 0.0, 0.0};
  const ConstantMassFunction f = constant_mass_part(scaled);
  const double half_h = 0.5 / prob.n();
  return {-f.f0, -half_h * (f.fB - f.f0), -half_h * (f.fT - f.f0)};
}

double rel(double diff, std::initializer_list<double> terms) {
  double scale = 1.0;
  for (double t : terms) scale = std::max(scale, t);
  return diff / scale;
}


StepResult solve_step(const BulkField& phi_n, const ModelParams& p, const SolverConfig& cfg, BoundaryMode mode,
                      const std::optional<BulkField>& initial_guess) {
  cfg.validate();
  require_admissible(phi_n);
  const StepProblem prob(phi_n, p, mode);
  BulkField phi = initial_guess ? *initial_guess : phi_n;
  if (initial_guess) {
    require_admissible(phi);
    prob.require_compatible(phi);
  }

  StepReport rep;
  rep.max_abs_iterate = std::max(phi_n.max_abs(), phi.max_abs());
  const double eps_m = std::numeric_limits<double>::epsilon();
  BulkField scaled = prob.scaled_gradient(phi);
  for (int iter = 0;; ++iter) {
    BulkField q = scaled;
    prob.project(q);
    const double res = prob.natural_norm(q);
    rep.final_residual = res;
    rep.newton_iters = iter;
    if (res <= cfg.newton_tol) break;
    if (iter == cfg.max_newton) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << cfg.max_newton << " iterations";
      throw SolverError(msg.str(), res);
    }

    q *= -1.0;
    const BulkField d = pcg(prob, phi, q, cfg, rep.linear_iters);
    const double slope = inner_omega(scaled, d);
    if (!(slope < 0.0)) throw SolverError("Newton direction is not a descent direction", res);

    double t = std::min(1.0, cfg.fraction_to_boundary * max_step_to_boundary(phi, d));
    const double f0 = prob.functional(phi);
    BulkField trial = phi;
    trial.axpy(t, d);
    rep.max_abs_iterate = std::max(rep.max_abs_iterate, trial.max_abs());
    if (-slope > 1e3 * eps_m * (1.0 + std::abs(f0))) {
      int back = 0;
      while (prob.functional(trial) > f0 + cfg.armijo_c * t * slope) {
        if (++back > cfg.max_backtracks) throw SolverError("line search failed to find sufficient decrease", res);
        t *= cfg.backtrack_factor;
        trial = phi;
        trial.axpy(t, d);
        rep.max_abs_iterate = std::max(rep.max_abs_iterate, trial.max_abs());
      }
    }
    phi = std::move(trial);
    restore_masses(prob, phi);
    rep.max_abs_iterate = std::max(rep.max_abs_iterate, phi.max_abs());
    if (!(rep.max_abs_iterate < 1.0)) throw DomainError("Newton iterate left (-1, 1)");
    scaled = prob.scaled_gradient(phi);
  }

  Potentials pot = recover_potentials(phi, phi_n, p, mode);
  StepResult out{std::move(phi),          std::move(pot.mu),      std::move(pot.mu_b),
                 std::move(pot.mu_t),     std::move(pot.phi_ghost), multipliers_from(prob, scaled),
                 rep};
  out.report.energy = total_energy(out.phi, p, mode);
  out.report.masses = masses(out.phi);
  out.report.dissipation = dissipation(out.mu, out.mu_b, out.mu_t, p, mode);
  return out;
}

}  // namespace

StepResult advance(const BulkField& phi_n, const ModelParams& p, const SolverConfig& cfg,
                   const std::optional<BulkField>& initial_guess) {
  return solve_step(phi_n, p, cfg, BoundaryMode::dynamic, initial_guess);
}

StepResult advance_neumann(const BulkField& phi_n, const ModelParams& p, const SolverConfig& cfg,
                           const std::optional<BulkField>& initial_guess) {
  return solve_step(phi_n, p, cfg, BoundaryMode::neumann, initial_guess);
}

StepResult advance(const BulkField& phi_n, const ModelParams& p, const SolverConfig& cfg, BoundaryMode mode,
                   const std::optional<BulkField>& initial_guess) {
  return solve_step(phi_n, p, cfg, mode, initial_guess);
}

Potentials recover_potentials(const BulkField& phi_next, const BulkField& phi_n, const ModelParams& p,
                              BoundaryMode mode) {
  const int n = phi_next.n();
  const double h = 1.0 / n;
  const double inv_s = 1.0 / p.s;
  const double inv_eps = 1.0 / p.eps;
  BulkField d1(n);
  {
    auto src = phi_next.values();
    auto dst = d1.values();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = fh_potential(src[k]).d1;
  }

  Potentials out;
  if (mode == BoundaryMode::neumann) {
    out.phi_ghost = neumann_extension(phi_next);
  } else {
    const StepProblem prob(phi_n, p, mode);
    const ConstantMassFunction f = constant_mass_part(prob.scaled_gradient(phi_next));
    const double c_b = 0.5 * h * (f.fB - f.f0);
    const double c_t = 0.5 * h * (f.fT - f.f0);
    const BulkField delta = phi_next - phi_n;
    BoundaryField below(n), above(n);
    for (Side side : {Side::bottom, Side::top}) {
      const int j = side == Side::bottom ? 0 : n;
      const BoundaryField inv = detail::neg_lap_gamma_pinv(trace(delta, side));
      const BoundaryField lap = laplacian_gamma(trace(phi_next, side));
      BoundaryField mu_s(n);
      for (int i = 0; i < n; ++i) {
        mu_s[i] = -inv_s * inv[i] + (side == Side::bottom ? c_b : c_t);
        const double g = inv_eps * (d1(i, j) - p.theta0 * phi_n(i, j)) - p.kappa * lap[i];
        if (side == Side::bottom) {
          const double dn = (g - mu_s[i]) * inv_eps;
          below[i] = phi_next(i, 1) - 2.0 * h * dn;
        } else {
          const double dn = (mu_s[i] - g) * inv_eps;
          above[i] = phi_next(i, n - 1) + 2.0 * h * dn;
        }
      }
      (side == Side::bottom ? out.mu_b : out.mu_t) = std::move(mu_s);
    }
    out.phi_ghost = with_ghosts(phi_next, below, above);
  }

  out.mu = -p.eps * laplacian_5pt(out.phi_ghost);
  out.mu.axpy(inv_eps, d1);
  out.mu.axpy(-inv_eps * p.theta0, phi_n);
  if (mode == BoundaryMode::neumann) {
    out.mu_b = trace(out.mu, Side::bottom);
    out.mu_t = trace(out.mu, Side::top);
  }
  return out;
}

SchemeResidual scheme_residual(const StepResult& r, const BulkField& phi_n, const ModelParams& p,
                               BoundaryMode mode) {
  const int n = phi_n.n();
  const double h = 1.0 / n;
  const double inv_s = 1.0 / p.s;
  const double inv_eps = 1.0 / p.eps;
  SchemeResidual out;

  const BulkField rate = inv_s * (r.phi - phi_n);
  const BulkField lap_mu = laplacian_5pt(neumann_extension(r.mu));
  const double inv_h2 = static_cast<double>(n) * n;
  const double mu_scale = 8.0 * inv_h2 * r.mu.max_abs();
  out.update = rel((rate - lap_mu).max_abs(), {rate.max_abs() + mu_scale});

  BulkField d1(n);
  {
    auto src = r.phi.values();
    auto dst = d1.values();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = inv_eps * fh_potential(src[k]).d1;
  }
  const BulkField expl = inv_eps * p.theta0 * phi_n;
  const BulkField diff = p.eps * laplacian_5pt(r.phi_ghost);
  const BulkField pot_res = r.mu - (d1 - expl - diff);
  out.potential =
      rel(pot_res.max_abs(), {r.mu.max_abs(), d1.max_abs(), expl.max_abs(), diff.max_abs()});

  // Ghost value of mu implied by the update equation on rows 0 and N; its
  // centered normal difference must vanish.
  double dmu = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j : {0, n}) {
      const int in = j == 0 ? 1 : n - 1;
      const double ghost = h * h * rate(i, j) - (r.mu(i + 1, j) + r.mu(i - 1, j) + r.mu(i, in) - 4.0 * r.mu(i, j));
      dmu = std::max(dmu, std::abs(r.mu(i, in) - ghost) / (2.0 * h));
    }
  }
  out.mu_neumann = rel(dmu, {(8.0 * r.mu.max_abs() + h * h * rate.max_abs()) / (2.0 * h)});

  if (mode == BoundaryMode::dynamic) {
    for (Side side : {Side::bottom, Side::top}) {
      const int j = side == Side::bottom ? 0 : n;
      const BoundaryField& mu_s = side == Side::bottom ? r.mu_b : r.mu_t;
      const BoundaryField rate_s = trace(rate, side);
      const BoundaryField lap_s = laplacian_gamma(mu_s);
      const double upd =
          rel((rate_s - lap_s).max_abs(), {rate_s.max_abs() + 4.0 * inv_h2 * mu_s.max_abs()});

      const BoundaryField dn = boundary_normal_derivative(r.phi_ghost, side);
      const BoundaryField lap_phi = laplacian_gamma(trace(r.phi, side));
      const double sign = side == Side::bottom ? -1.0 : 1.0;
      double worst = 0.0, t_mu = 0.0, t_i = 0.0, t_e = 0.0, t_k = 0.0, t_n = 0.0;
      for (int i = 0; i < n; ++i) {
        const double a = d1(i, j), e = expl(i, j), k = p.kappa * lap_phi[i], nn = p.eps * dn[i];
        worst = std::max(worst, std::abs(mu_s[i] - (a - e - k + sign * nn)));
        t_mu = std::max(t_mu, std::abs(mu_s[i]));
        t_i = std::max(t_i, std::abs(a));
        t_e = std::max(t_e, std::abs(e));
        t_k = std::max(t_k, std::abs(k));
        t_n = std::max(t_n, std::abs(nn));
      }
      const double potr = rel(worst, {t_mu, t_i, t_e, t_k, t_n});
      if (side == Side::bottom) {
        out.surface_update_b = upd;
        out.surface_potential_b = potr;
      } else {
        out.surface_update_t = upd;
        out.surface_potential_t = potr;
      }
    }
  }
  return out;
}

double dissipation(const BulkField& mu, const BoundaryField& mu_b, const BoundaryField& mu_t, const ModelParams& p,
                   BoundaryMode mode) {
  double d = grad_norm_sq(neumann_extension(mu));
  if (mode == BoundaryMode::dynamic) {
    const BoundaryField gb = diff_gamma(mu_b);
    const BoundaryField gt = diff_gamma(mu_t);
    d += inner_gamma(gb, gb) + inner_gamma(gt, gt);
  }
  return p.s * d;
}

}  // namespace fhdbc
