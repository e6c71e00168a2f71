#include "adagradlab/diagnostics.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <vector>

namespace adagradlab::diag {

double xi(double grad_norm_sq, double nu) {
  require(nu > 0.0, "xi: nu must be positive");
  require(grad_norm_sq >= 0.0, "xi: squared gradient norm must be nonnegative");
  return grad_norm_sq / std::sqrt(nu);
}

double xi_hat(double grad_norm, double g_norm, double nu) {
  require(nu > 0.0, "xi_hat: nu must be positive");
  require(grad_norm >= 0.0 && g_norm >= 0.0, "xi_hat: norms must be nonnegative");
  return grad_norm * g_norm / std::sqrt(nu);
}

double xi_coord(std::span<const double> partials, std::span<const double> nu) {
  require_same_dim(partials.size(), nu.size(), "xi_coord partials vs nu");
  double s = 0.0;
  for (std::size_t l = 0; l < partials.size(); ++l) {
    require(nu[l] > 0.0, "xi_coord: nu must be elementwise positive");
    s += partials[l] * partials[l] / std::sqrt(nu[l]);
  }
  return s;
}

BoundConstants compute_bound_constants(double f_w1, double f_star, double eta, double L,
                                       double D0, double D1, double nu0,
                                       double grad0_norm_sq) {
  require(eta > 0.0, "bound constants: eta must be positive");
  require(L > 0.0, "bound constants: L must be positive");
  require(D1 > 0.0, "bound constants: D1 must be positive");
  require(nu0 > 0.0, "bound constants: nu0 must be positive");
  require(D0 >= 0.0, "bound constants: D0 must be nonnegative");
  require(grad0_norm_sq >= 0.0, "bound constants: grad0_norm_sq must be nonnegative");

  BoundConstants c;
  c.inputs = {f_w1, f_star, eta, L, D0, D1, nu0, grad0_norm_sq};
  const double sqrt_nu0 = std::sqrt(nu0);
  const double leta = L * eta;
  c.C1 = 4.0 *
         (f_w1 - f_star + 0.5 * eta * D1 * grad0_norm_sq / sqrt_nu0 +
          (2.0 * eta * (leta * D1) * (leta * D1) + eta * D1 * leta * leta + 0.5 * eta * D0) /
              sqrt_nu0 -
          0.5 * L * eta * eta * std::log(nu0)) /
         eta;
  c.C2 = 2.0 * L * eta;
  c.C3 = 4.0 * D1 * c.C1 + 48.0 * c.C2 * D1 * std::log(4.0 * c.C2 * D1 + std::exp(1.0)) +
         2.0 * sqrt_nu0;
  return c;
}

double high_prob_bound_rhs(const BoundConstants& c, std::uint64_t T, double delta, double D0) {
  require(delta > 0.0 && delta < 1.0, "high_prob_bound_rhs: delta must be in (0,1)");
  require(T >= 1, "high_prob_bound_rhs: T must be positive");
  require(D0 >= 0.0, "high_prob_bound_rhs: D0 must be nonnegative");
  const double Td = static_cast<double>(T);
  const double log_term = std::log(2.0 * std::sqrt(2.0 * D0 * Td) + c.C3);
  const double d2 = delta * delta;
  return 2.0 * std::sqrt(2.0 * D0) * (2.0 * c.C2 * log_term + c.C1) / (std::sqrt(Td) * d2) +
         c.C3 * (c.C1 + 2.0 * c.C2 * log_term) / (Td * d2);
}

double relaxed_eta_threshold(double L1, double D1) {
  require(L1 > 0.0 && D1 > 0.0, "relaxed threshold: L1, D1 must be positive");
  return std::min(1.0 / (64.0 * D1), 1.0 / (8.0 * std::sqrt(D1))) / L1;
}

Lemma1Gap lemma1_gap(std::span<const double> w, double nu_prev, double g_prev_norm_sq,
                     const problems::Problem& problem, double eta,
                     std::optional<double> grad_prev_norm_sq) {
  if (!problem.has_support())
    throw ConfigError("lemma1_gap: problem must expose a finite noise support");
  const auto& k = problem.constants;
  if (!k.L || !k.D0 || !k.D1)
    throw ConfigError("lemma1_gap: problem must certify L, D0, D1");
  require(nu_prev > 0.0, "lemma1_gap: nu_prev must be positive");
  require(g_prev_norm_sq >= 0.0, "lemma1_gap: g_prev_norm_sq must be nonnegative");
  require(eta >= 0.0, "lemma1_gap: eta must be nonnegative");

  const Vec grad = problem.full_gradient(w);
  const double grad_sq = norm_sq(grad);
  const double sqrt_prev = std::sqrt(nu_prev);

  double lhs = 0.0;
  double expect_shrink = 0.0;   // E ||g||^2 / (sqrt(nu_t) + sqrt(nu_prev))^2
  double expect_inv_sqrt = 0.0;  // E 1/sqrt(nu_t)
  for (const auto& atom : problem.support) {
    const Vec g = atom.outcome(w);
    const double nu_t = nu_prev + norm_sq(g);
    const double sqrt_t = std::sqrt(nu_t);
    lhs += atom.prob * eta * (1.0 / sqrt_prev - 1.0 / sqrt_t) * dot(grad, g);
    const double denom = sqrt_t + sqrt_prev;
    expect_shrink += atom.prob * norm_sq(g) / (denom * denom);
    expect_inv_sqrt += atom.prob / sqrt_t;
  }

  const double xi_prev = grad_prev_norm_sq.value_or(grad_sq) / sqrt_prev;
  const double expect_dxi = xi_prev - grad_sq * expect_inv_sqrt;

  const double L = *k.L, D0 = *k.D0, D1 = *k.D1;
  const double leta = L * eta;
  const double rhs = 0.75 * eta * grad_sq / sqrt_prev +
                     0.5 * (eta / sqrt_prev) * D0 * expect_shrink +
                     0.5 * eta * D1 * expect_dxi +
                     (eta * (leta * D1) * (leta * D1) + 0.5 * eta * D1 * leta * leta) *
                         g_prev_norm_sq / (nu_prev * sqrt_prev);
  return {lhs, rhs};
}

SeriesBounds series_bounds_check(std::span<const double> a) {
  require(a.size() >= 2, "series_bounds_check: need at least a_0 and a_1");
  require(a[0] > 0.0, "series_bounds_check: a_0 must be positive");
  for (double v : a) require(v >= 0.0, "series_bounds_check: entries must be nonnegative");

  SeriesBounds out;
  double cum = a[0];
  for (std::size_t t = 1; t < a.size(); ++t) {
    const double prev = cum;
    cum += a[t];
    out.power_three_halves.lhs += a[t] / (cum * std::sqrt(cum));
    out.ratio.lhs += a[t] / cum;
    const double pair_sum = std::sqrt(prev) + std::sqrt(cum);
    out.mixed.lhs += a[t] / (std::sqrt(cum) * pair_sum * pair_sum);
  }
  out.power_three_halves.rhs = 2.0 / std::sqrt(a[0]);
  out.ratio.rhs = std::log(cum) - std::log(a[0]);
  out.mixed.rhs = 1.0 / std::sqrt(a[0]);
  return out;
}

namespace {

double descent_residual(const problems::ValueFn& value, const problems::GradFn& grad,
                        std::span<const double> w1, std::span<const double> w2, double coef) {
  require_same_dim(w1.size(), w2.size(), "descent residual points");
  const Vec g2 = grad(w2);
  double inner = 0.0, dist_sq = 0.0;
  for (std::size_t l = 0; l < w1.size(); ++l) {
    const double d = w1[l] - w2[l];
    inner += g2[l] * d;
    dist_sq += d * d;
  }
  return value(w1) - value(w2) - inner - 0.5 * coef * dist_sq;
}

}  // namespace

double descent_residual_uniform(const problems::ValueFn& value, const problems::GradFn& grad,
                                std::span<const double> w1, std::span<const double> w2,
                                double L) {
  require(L >= 0.0, "descent residual: L must be nonnegative");
  return descent_residual(value, grad, w1, w2, L);
}

double descent_residual_relaxed(const problems::ValueFn& value, const problems::GradFn& grad,
                                std::span<const double> w1, std::span<const double> w2,
                                double L0, double L1) {
  require(L0 >= 0.0 && L1 > 0.0, "descent residual: L0 >= 0, L1 > 0 required");
  double dist_sq = 0.0;
  for (std::size_t l = 0; l < w1.size(); ++l) {
    const double d = w1[l] - w2[l];
    dist_sq += d * d;
  }
  if (!(std::sqrt(dist_sq) <= 1.0 / L1 + 1e-15))
    throw std::invalid_argument("descent residual (relaxed): ||w1 - w2|| must be <= 1/L1");
  const double coef = L0 + L1 * norm(grad(w2));
  return descent_residual(value, grad, w1, w2, coef);
}

RateFit fit_rate(std::span<const RatePoint> points) {
  require(points.size() >= 3, "fit_rate: need at least 3 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(points.size());
  std::vector<double> xs(points.size()), ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].T >= 1, "fit_rate: T must be positive");
    require(points[i].y > 0.0, "fit_rate: y must be positive");
    xs[i] = std::log(static_cast<double>(points[i].T));
    ys[i] = std::log(points[i].y);
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 0.0, "fit_rate: abscissae are degenerate");
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  return fit;
}

}  // namespace adagradlab::diag
