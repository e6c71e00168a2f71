#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adagradlab/common.hpp"
#include "adagradlab/problems.hpp"

namespace adagradlab::diag {

/// xi(t) = ||grad f(w_t)||^2 / sqrt(nu_t), the telescoping potential.
double xi(double grad_norm_sq, double nu);

/// xi_hat(t) = ||grad f(w_t)|| * ||g_t|| / sqrt(nu_t).
double xi_hat(double grad_norm, double g_norm, double nu);

/// Coordinate variant: sum_l partial_l^2 / sqrt(nu_l).
double xi_coord(std::span<const double> partials, std::span<const double> nu);

/// The three constants of the high-probability gradient-norm bound, kept
/// with the inputs they were evaluated from.
struct BoundConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  struct Inputs {
    double f_w1, f_star, eta, L, D0, D1, nu0, grad0_norm_sq;
  } inputs{};
};

BoundConstants compute_bound_constants(double f_w1, double f_star, double eta, double L,
                                       double D0, double D1, double nu0,
                                       double grad0_norm_sq);

/// Right-hand side of the bound on min_{t<=T} ||grad f(w_t)||^2 at
/// confidence 1 - delta. With D0 = 0 the 1/sqrt(T) term vanishes and the
/// bound is O(1/T).
double high_prob_bound_rhs(const BoundConstants& c, std::uint64_t T, double delta, double D0);

/// Learning-rate threshold below which the relaxed-smoothness convergence
/// guarantee applies: (1/L1) * min(1/(64 D1), 1/(8 sqrt(D1))).
double relaxed_eta_threshold(double L1, double D1);

struct Lemma1Gap {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Exact one-step check of the error-term bound on a finite-support
/// problem: lhs enumerates E[<grad f(w), eta (1/sqrt(nu_prev) -
/// 1/sqrt(nu_t)) g>] over the support (nu_t = nu_prev + ||g||^2 per
/// outcome); rhs is the four-term bound with E[xi(t-1) - xi(t)] enumerated
/// the same way. xi(t-1) uses grad_prev_norm_sq when given (the literal
/// previous-iterate indexing), else ||grad f(w)||^2 (standalone form).
Lemma1Gap lemma1_gap(std::span<const double> w, double nu_prev, double g_prev_norm_sq,
                     const problems::Problem& problem, double eta,
                     std::optional<double> grad_prev_norm_sq = std::nullopt);

struct SeriesBounds {
  struct Pair {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const { return lhs <= rhs + 1e-12; }
  };
  Pair power_three_halves;  // sum a_t / (sum_{s<=t} a_s)^{3/2}  vs  2/sqrt(a_0)
  Pair ratio;               // sum a_t / sum_{s<=t} a_s          vs  ln(sum) - ln(a_0)
  Pair mixed;               // sum a_t / (sqrt(c_t)(sqrt(c_{t-1})+sqrt(c_t))^2) vs 1/sqrt(a_0)
};

/// Evaluates both sides of the three partial-sum inequalities for a
/// nonnegative sequence with a_0 > 0 (length >= 2).
SeriesBounds series_bounds_check(std::span<const double> a);

/// f(w1) - f(w2) - <grad f(w2), w1 - w2> - (L/2)||w1 - w2||^2;
/// nonpositive when f is L-smooth.
double descent_residual_uniform(const problems::ValueFn& value, const problems::GradFn& grad,
                                std::span<const double> w1, std::span<const double> w2,
                                double L);

/// Same with coefficient L0 + L1 ||grad f(w2)||; requires
/// ||w1 - w2|| <= 1/L1.
double descent_residual_relaxed(const problems::ValueFn& value, const problems::GradFn& grad,
                                std::span<const double> w1, std::span<const double> w2,
                                double L0, double L1);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct RatePoint {
  std::uint64_t T = 0;
  double y = 0.0;
};

/// Least-squares line through (ln T, ln y); the slope is the fitted rate
/// exponent. Needs >= 3 points, all positive.
RateFit fit_rate(std::span<const RatePoint> points);

}  // namespace adagradlab::diag
