#include "fhdbc/check_ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "fhdbc/elliptic.hpp"
#include "fhdbc/energy.hpp"
#include "fhdbc/grid.hpp"

namespace fhdbc {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double operator()(double lo = -1.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53);
  }
  template <class F>
  F fill(F f, double lo = -1.0, double hi = 1.0) {
    for (double& v : f.values()) v = (*this)(lo, hi);
    return f;
  }

 private:
  std::mt19937_64 gen_;
};

struct Suite {
  std::vector<CheckResult> out;
  void add(const std::string& name, int n, double value, double tol) {
    out.push_back({name, n, value, tol, value <= tol});
  }
  /// Sign property: pass when value > 0; the reported margin is -value.
  void positive(const std::string& name, int n, double value) {
    out.push_back({name, n, value, 0.0, value > 0.0});
  }
};

/// h sum_i 1/2 (f_{i,J+1/2} + f_{i,J-1/2}) psi_{i,J}, written out directly.
double boundary_flux(const EdgeFieldY& fy, const GhostField& psi, int jrow) {
  const int n = psi.n();
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += 0.5 * (fy(i, jrow) + fy(i, jrow - 1)) * psi(i, jrow);
  return s / n;
}

double rel_defect(double defect, std::initializer_list<double> terms) {
  double scale = 0.0;
  for (double t : terms) scale += std::abs(t);
  return std::abs(defect) / std::max(scale, 1e-300);
}

BulkField random_admissible(Rng& rng, int n, double amp) { return rng.fill(BulkField(n), -amp, amp); }

/// Random element of the constraint tangent space for the given mode.
BulkField random_tangent(Rng& rng, int n, BoundaryMode mode) {
  BulkField q = rng.fill(BulkField(n));
  if (mode == BoundaryMode::dynamic)
    remove_constant_mass_part(q);
  else
    remove_bulk_mean(q);
  return q;
}

void grid_checks(Suite& s, Rng& rng, int n) {
  const GhostField psi = rng.fill(GhostField(n));
  const GhostField phi = rng.fill(GhostField(n));
  const GhostField g = rng.fill(GhostField(n), 0.5, 2.0);
  const EdgeFieldX fx = rng.fill(EdgeFieldX(n));
  const EdgeFieldY fy = rng.fill(EdgeFieldY(n, true));
  const BulkField psi_in = interior(psi);

  {
    const auto dpsi_x = face_ops_x(psi).diff;
    const auto dpsi_y = face_ops_y(psi).diff;
    const BulkField div = divergence(GhostField(n, 1.0), fx, fy);
    const double lhs = inner_omega(psi_in, div);
    const double grad = edge_inner(dpsi_x, dpsi_y, fx, fy);
    const double top = boundary_flux(fy, psi, n);
    const double bot = boundary_flux(fy, psi, 0);
    s.add("sbp_divergence", n, rel_defect(lhs + grad - top + bot, {lhs, grad, top, bot}), 1e-12);
  }
  {
    const auto fxp = face_ops_x(phi);
    const auto fyp = face_ops_y(phi);
    const auto gx = face_ops_x(g).avg;
    const auto gy = face_ops_y(g).avg;
    EdgeFieldX agx = gx;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i < n; ++i) agx(i, j) *= fxp.diff(i, j);
    EdgeFieldY agy = gy;
    for (int j = -1; j <= n; ++j)
      for (int i = 0; i < n; ++i) agy(i, j) *= fyp.diff(i, j);
    const BulkField div = divergence(g, fxp.diff, fyp.diff);
    const double lhs = inner_omega(psi_in, div);
    const double grad = edge_inner(face_ops_x(psi).diff, face_ops_y(psi).diff, agx, agy);
    const double top = boundary_flux(agy, psi, n);
    const double bot = boundary_flux(agy, psi, 0);
    s.add("sbp_weighted_divergence", n, rel_defect(lhs + grad - top + bot, {lhs, grad, top, bot}), 1e-12);
  }
  {
    const BulkField lap = laplacian_5pt(phi);
    const double lhs = inner_omega(psi_in, lap);
    const double grad = edge_inner(face_ops_x(psi).diff, face_ops_y(psi).diff, face_ops_x(phi).diff,
                                   face_ops_y(phi).diff);
    const double top = inner_gamma(boundary_normal_derivative(phi, Side::top), trace(psi_in, Side::top));
    const double bot = inner_gamma(boundary_normal_derivative(phi, Side::bottom), trace(psi_in, Side::bottom));
    s.add("sbp_laplacian", n, rel_defect(lhs + grad - top + bot, {lhs, grad, top, bot}), 1e-12);

    const auto dphi = face_ops_y(phi).diff;
    const BulkField ady = cell_ops_y(dphi).avg;
    const BoundaryField nb = boundary_normal_derivative(phi, Side::bottom);
    const BoundaryField nt = boundary_normal_derivative(phi, Side::top);
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      d = std::max(d, std::abs(ady(i, 0) - nb[i]));
      d = std::max(d, std::abs(ady(i, n) - nt[i]));
    }
    s.add("centered_normal_difference", n, d / std::max({1.0, nb.max_abs(), nt.max_abs()}), 1e-14);

    const BulkField div = divergence(GhostField(n, 1.0), face_ops_x(phi).diff, face_ops_y(phi).diff);
    s.add("divergence_of_gradient_is_5pt", n, (div - lap).max_abs() / std::max(1.0, lap.max_abs()), 1e-14);
  }
  {
    const double total = mean_omega(BulkField(n, 1.0));
    s.add("omega_weights_sum_to_one", n, std::abs(total - 1.0), 1e-14);
    s.add("gamma_weights_sum_to_one", n, std::abs(mean_gamma(BoundaryField(n, 1.0)) - 1.0), 1e-14);
  }
  {
    const double a = rng(), b = rng();
    const GhostField comb = a * psi + b * phi;
    const BulkField lhs = laplacian_5pt(comb);
    const BulkField rhs = a * laplacian_5pt(psi) + b * laplacian_5pt(phi);
    const BulkField lh_lhs = apply_Lh(interior(comb));
    const BulkField lh_rhs = a * apply_Lh(psi_in) + b * apply_Lh(interior(phi));
    const double scale = std::max(1.0, lhs.max_abs());
    s.add("operator_linearity", n,
          std::max((lhs - rhs).max_abs(), (lh_lhs - lh_rhs).max_abs()) / scale, 1e-13);
  }
}

void elliptic_checks(Suite& s, Rng& rng, int n) {
  BulkField a = rng.fill(BulkField(n));
  BulkField b = rng.fill(BulkField(n));
  remove_bulk_mean(a);
  remove_bulk_mean(b);
  {
    const double ab = inner_omega(a, apply_Lh(b));
    const double ba = inner_omega(apply_Lh(a), b);
    s.add("Lh_symmetry", n, rel_defect(ab - ba, {ab, ba}), 1e-12);
    s.positive("Lh_positivity", n, inner_omega(a, apply_Lh(a)));
    const double grad = grad_norm_sq(neumann_extension(a));
    const double quad = inner_omega(a, apply_Lh(a));
    s.add("Lh_energy_is_gradient_norm", n, rel_defect(quad - grad, {quad, grad}), 1e-12);
    const BulkField ghost_form = -1.0 * laplacian_5pt(neumann_extension(a));
    s.add("Lh_equals_reflected_stencil", n, (apply_Lh(a) - ghost_form).max_abs() / ghost_form.max_abs(), 1e-14);
  }
  {
    const BulkField x = solve_Lh(a);
    s.add("Lh_solve_then_apply", n, (apply_Lh(x) - a).max_abs() / a.max_abs(), 1e-12);
    const BulkField y = solve_Lh(apply_Lh(b));
    s.add("Lh_apply_then_solve", n, (y - b).max_abs() / b.max_abs(), 1e-12);
    s.add("Lh_solution_mean_zero", n, std::abs(mean_omega(x)), 1e-13);
  }
  {
    BoundaryField r = rng.fill(BoundaryField(n));
    const double m = mean_gamma(r);
    for (double& v : r.values()) v -= m;
    const BoundaryField x = solve_neg_lap_gamma(r);
    s.add("gamma_solve_then_apply", n, (-1.0 * laplacian_gamma(x) - r).max_abs() / r.max_abs(), 1e-12);
    BoundaryField r2 = rng.fill(BoundaryField(n));
    const double m2 = mean_gamma(r2);
    for (double& v : r2.values()) v -= m2;
    const double ab = inner_minus1_gamma(r, r2), ba = inner_minus1_gamma(r2, r);
    s.add("minus1_gamma_symmetry", n, rel_defect(ab - ba, {ab, ba}), 1e-11);
  }
  {
    const double ab = inner_minus1(a, b), ba = inner_minus1(b, a);
    s.add("minus1_symmetry", n, rel_defect(ab - ba, {ab, ba}), 1e-11);
  }
  {
    const BulkField psi = rng.fill(BulkField(n));
    const MassDecomposition md = mass_decompose(psi);
    const MassTriple mq = masses(md.q);
    s.add("decomposition_means_zero", n, std::max({std::abs(mq.bulk), std::abs(mq.bottom), std::abs(mq.top)}),
          1e-13);
    const ConstantMassFunction f{rng(), rng(), rng()};
    const BulkField ff = f.field(n);
    const double o1 = inner_omega(md.q, ff);
    const double o2 = inner_gamma(trace(md.q, Side::bottom), trace(ff, Side::bottom));
    const double o3 = inner_gamma(trace(md.q, Side::top), trace(ff, Side::top));
    s.add("decomposition_orthogonality", n, std::max({std::abs(o1), std::abs(o2), std::abs(o3)}), 1e-13);
    s.add("decomposition_reassembles", n, (md.a.field(n) + md.q - psi).max_abs(), 1e-14);
  }
}

void energy_checks(Suite& s, Rng& rng, int n, BoundaryMode mode) {
  const std::string tag = mode == BoundaryMode::dynamic ? "" : "_neumann";
  const ModelParams p{0.05, 0.05, 3.0, 1e-3};
  const BulkField phi_n = random_admissible(rng, n, 0.5);
  BulkField phi = phi_n;
  phi.axpy(0.2, random_tangent(rng, n, mode));
  const StepProblem prob(phi_n, p, mode);

  {
    const BulkField psi = random_tangent(rng, n, mode);
    const double tau = 1e-5;
    BulkField plus = phi, minus = phi;
    plus.axpy(tau, psi);
    minus.axpy(-tau, psi);
    const double fd = (prob.functional(plus) - prob.functional(minus)) / (2.0 * tau);
    const BulkField g = prob.gradient(phi);
    double dot = 0.0;
    auto gv = g.values();
    auto pv = psi.values();
    for (std::size_t k = 0; k < gv.size(); ++k) dot += gv[k] * pv[k];
    s.add("step_gradient_vs_central_difference" + tag, n, std::abs(fd - dot) / std::max(1.0, std::abs(dot)), 1e-6);
  }
  {
    const BulkField d = random_tangent(rng, n, mode);
    const double tau = 1e-5;
    BulkField plus = phi, minus = phi;
    plus.axpy(tau, d);
    minus.axpy(-tau, d);
    const BulkField fd = (1.0 / (2.0 * tau)) * (prob.gradient(plus) - prob.gradient(minus));
    const BulkField hd = prob.hessian_apply(phi, d);
    s.add("hessian_vs_central_difference" + tag, n, (fd - hd).max_abs() / hd.max_abs(), 1e-5);
    double dhd = 0.0;
    auto hv = hd.values();
    auto dv = d.values();
    for (std::size_t k = 0; k < hv.size(); ++k) dhd += hv[k] * dv[k];
    s.positive("hessian_positive_on_tangent_space" + tag, n, dhd);
  }
  {
    BulkField phi2 = phi_n;
    phi2.axpy(0.2, random_tangent(rng, n, mode));
    BulkField mid = 0.5 * (phi + phi2);
    const double gap = 0.5 * prob.functional(phi) + 0.5 * prob.functional(phi2) - prob.functional(mid);
    s.positive("step_functional_strict_convexity" + tag, n, gap);
  }
  {
    const int shift = 1 + static_cast<int>(rng(0.0, n - 1.0));
    auto rolled = [&](const BulkField& f) {
      BulkField out(n);
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) out(i, j) = f(i + shift, j);
      return out;
    };
    const StepProblem shifted(rolled(phi_n), p, mode);
    const double e0 = total_energy(phi, p, mode), e1 = total_energy(rolled(phi), p, mode);
    const double f0 = prob.functional(phi), f1 = shifted.functional(rolled(phi));
    s.add("energy_translation_invariance" + tag, n, rel_defect(e0 - e1, {e0}), 1e-13);
    s.add("functional_translation_invariance" + tag, n, rel_defect(f0 - f1, {f0}), 1e-13);
    const double em = total_energy(-1.0 * phi, p, mode);
    s.add("energy_even_symmetry" + tag, n, rel_defect(e0 - em, {e0}), 1e-13);
  }
}

}  // namespace

std::vector<CheckResult> run_operator_checks(std::uint64_t seed) {
  Suite s;
  Rng rng(seed);
  for (int n : {4, 8}) {
    grid_checks(s, rng, n);
    elliptic_checks(s, rng, n);
    energy_checks(s, rng, n, BoundaryMode::dynamic);
    energy_checks(s, rng, n, BoundaryMode::neumann);
  }
  return s.out;
}

}  // namespace fhdbc
