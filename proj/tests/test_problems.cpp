#include <doctest.h>

#include <cmath>

#include "adagradlab/assumption_checkers.hpp"
#include "adagradlab/optimizers.hpp"
#include "adagradlab/problems.hpp"
#include "adagradlab/rng.hpp"

using namespace adagradlab;
using namespace adagradlab::problems;

namespace {

Vec random_point(std::size_t dim, std::mt19937_64& gen, double scale = 2.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec w(dim);
  for (double& x : w) x = normal(gen);
  return w;
}

}  // namespace

TEST_CASE("two-point quadratic: exact noise moments") {
  const auto p = make_twopoint_quadratic(1.0, 1.0, 1);
  const Vec w{3.0};
  CHECK(norm_sq(p.full_gradient(w)) == 9.0);
  CHECK(p.expected_grad_sq(w) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(*p.constants.D0 == 1.0);
  CHECK(*p.constants.D1 == 1.0);
  CHECK(p.constants.coordinate_affine_holds);

  double prob_sum = 0.0;
  for (const auto& atom : p.support) prob_sum += atom.prob;
  CHECK(prob_sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-point quadratic: noiseless oracle equals the gradient") {
  const auto p = make_twopoint_quadratic(2.0, 0.0, 3);
  auto gen = rng::stream(1);
  for (int i = 0; i < 20; ++i) {
    const Vec w = random_point(3, gen);
    const Vec g = p.oracle(w, gen);
    const Vec grad = p.full_gradient(w);
    CHECK(g == grad);
  }
}

TEST_CASE("two-point quadratic: noise is centered at the origin") {
  const auto p = make_twopoint_quadratic(1.0, 2.5, 4);
  const Vec zero(4, 0.0);
  const Vec mean = p.expected_gradient(zero);
  for (double m : mean) CHECK(std::abs(m) <= 1e-15);
}

TEST_CASE("finite-support oracles are unbiased at 100 random probes") {
  auto gen = rng::stream(99);
  const Problem probs[] = {
      make_twopoint_quadratic(1.0, 1.0, 2),
      make_twopoint_quadratic(3.0, 0.5, 5),
      make_interpolation_least_squares(6, 11, 7),
      make_l0l1_cosh(0.7),
  };
  for (const auto& p : probs) {
    for (int i = 0; i < 100; ++i) {
      const Vec w = random_point(p.dim, gen);
      const Vec mean = p.expected_gradient(w);
      const Vec grad = p.full_gradient(w);
      for (std::size_t l = 0; l < p.dim; ++l)
        CHECK(std::abs(mean[l] - grad[l]) <= 1e-12 * std::max(1.0, std::abs(grad[l])));
    }
  }
}

TEST_CASE("certified affine constants hold exactly on finite supports") {
  auto gen = rng::stream(100);
  const Problem probs[] = {
      make_twopoint_quadratic(1.0, 1.0, 2),
      make_twopoint_quadratic(2.0, 0.0, 3),
      make_interpolation_least_squares(5, 9, 13),
      make_l0l1_cosh(1.0),
  };
  for (const auto& p : probs) {
    for (int i = 0; i < 100; ++i) {
      const Vec w = random_point(p.dim, gen);
      const double lhs = p.expected_grad_sq(w);
      const double rhs = *p.constants.D0 + *p.constants.D1 * norm_sq(p.full_gradient(w));
      CHECK(lhs <= rhs + 1e-9 * std::max(1.0, rhs));
    }
  }
}

TEST_CASE("Monte-Carlo second moment agrees with exact enumeration") {
  const auto p = make_interpolation_least_squares(7, 12, 3);
  auto gen = rng::stream(5);
  const Vec w = random_point(12, gen);
  const double exact = p.expected_grad_sq(w);
  const auto mc = checkers::mc_second_moment(p, w, 40000, 11, 0);
  CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.std_error + 1e-12);
}

TEST_CASE("clipped-normal moments match their closed forms") {
  // Independent anchors: m2 = 1 - 2 phi(1), m4 = 3 - 4 Phi(-1) - 8 phi(1).
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  const double Phi_m1 = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
  CHECK(truncated_normal_m2() == doctest::Approx(1.0 - 2.0 * phi1).epsilon(1e-12));
  CHECK(truncated_normal_m4() ==
        doctest::Approx(3.0 - 4.0 * Phi_m1 - 8.0 * phi1).epsilon(1e-12));
}

TEST_CASE("truncated-Gaussian regression: zero point, unbiasedness, moments") {
  const auto p = make_truncated_gaussian_regression(4, 1);
  auto gen = rng::stream(8);

  const Vec zero(4, 0.0);
  for (int i = 0; i < 10; ++i) {
    const Vec g = p.oracle(zero, gen);
    for (double v : g) CHECK(v == 0.0);
  }

  // Sample mean of the oracle against the analytic 2 m2 w, 3 sigma band.
  const Vec w{0.8, -1.3, 0.4, 2.0};
  const Vec grad = p.full_gradient(w);
  const std::size_t n = 100000;
  Vec mean(4, 0.0), sq(4, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec g = p.oracle(w, gen);
    for (int l = 0; l < 4; ++l) {
      mean[l] += g[l];
      sq[l] += g[l] * g[l];
    }
  }
  for (int l = 0; l < 4; ++l) {
    mean[l] /= n;
    const double var = sq[l] / n - mean[l] * mean[l];
    const double band = 3.0 * std::sqrt(var / n);
    CHECK(std::abs(mean[l] - grad[l]) <= band);
  }

  // Full-norm second moment matches 4 (m4 + (d-1) m2^2) ||w||^2.
  const double m2 = truncated_normal_m2(), m4 = truncated_normal_m4();
  const auto mc = checkers::mc_second_moment(p, w, 200000, 21, 0);
  const double analytic = 4.0 * (m4 + 3.0 * m2 * m2) * norm_sq(w);
  CHECK(std::abs(mc.mean - analytic) <= 4.0 * mc.std_error);
  CHECK(*p.constants.D1 == doctest::Approx((m4 + 3.0 * m2 * m2) / (m2 * m2)).epsilon(1e-12));
  CHECK_FALSE(p.constants.coordinate_affine_holds);
}

TEST_CASE("interpolating least squares vanishes at the interpolating point") {
  const auto p = make_interpolation_least_squares(8, 20, 31);
  CHECK(*p.constants.D0 == 0.0);
  auto gen = rng::stream(14);
  for (int i = 0; i < 50; ++i) {
    const Vec w = random_point(20, gen);
    CHECK(p.value(w) >= 0.0);
    const double ratio_bound = *p.constants.D1 * norm_sq(p.full_gradient(w));
    CHECK(p.expected_grad_sq(w) <= ratio_bound * (1.0 + 1e-9));
  }

  // Drive the iterate to an interpolating point; every component gradient
  // vanishes there (to rounding), not just the average.
  optim::NormState st{p.initial_point, 1.0, 0};
  auto g2 = rng::stream(2, 0x2a);
  for (int t = 0; t < 20000; ++t) st = optim::adagrad_norm_step(st, p.oracle(st.w, g2), 1.0);
  for (const auto& comp : p.components) CHECK(norm_sq(comp(st.w)) <= 1e-20);
}

TEST_CASE("single-component least squares has E||g||^2 = ||grad f||^2") {
  const auto p = make_interpolation_least_squares(1, 3, 2);
  CHECK(*p.constants.D1 == doctest::Approx(1.0).epsilon(1e-9));
  auto gen = rng::stream(3);
  const Vec w = random_point(3, gen);
  CHECK(p.expected_grad_sq(w) ==
        doctest::Approx(norm_sq(p.full_gradient(w))).epsilon(1e-12));
}

TEST_CASE("exact D1 certificate dominates the probe-grid maximum") {
  const auto p = make_interpolation_least_squares(6, 14, 8);
  auto gen = rng::stream(4);
  double max_ratio = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec w = random_point(14, gen);
    const double denom = norm_sq(p.full_gradient(w));
    if (denom < 1e-12) continue;
    max_ratio = std::max(max_ratio, p.expected_grad_sq(w) / denom);
  }
  CHECK(max_ratio <= *p.constants.D1 * (1.0 + 1e-9));
}

TEST_CASE("exact D1 certificate is attained (two-component residual grid)") {
  // With n = 2 the residual space is a circle, so a dense angle grid is an
  // exhaustive independent oracle for sup E||g||^2 / ||grad f||^2. Points
  // with residual r are reached via the min-norm preimage
  // w = w_interp + X^T (X X^T)^{-1} r.
  const auto p = make_interpolation_least_squares(2, 5, 8);
  // Recover the two data rows from the component gradients: at w the
  // component gradient is (<x_i, w> - y_i) x_i; evaluating at unit vectors
  // recovers X and y up to the shared residual factor. Use finite probes.
  // Instead reconstruct X^T r directly from component gradients:
  //   grad_i(w) = r_i(w) x_i, and r_i(w) is affine in w.
  auto residual = [&](const Vec& w, int i) {
    // r_i = <x_i, w> - y_i appears as the one-dimensional scale between
    // grad_i at w and at 2w... simpler: r_i^2 ||x_i||^2 = ||grad_i||^2 and
    // the sign does not matter anywhere below.
    return std::sqrt(norm_sq(p.components[i](w)));
  };
  (void)residual;
  double grid_max = 0.0;
  auto gen = rng::stream(12);
  // Random search refined by a local golden scan over the best direction in
  // w-space restricted to 2 random directions is still not exhaustive; use
  // the structure instead: maximize over w = a u + b v for a fixed random
  // plane through the interpolating set... practical route: many random w
  // plus coordinate ascent.
  Vec best_w = random_point(5, gen);
  for (int i = 0; i < 4000; ++i) {
    const Vec w = random_point(5, gen);
    const double denom = norm_sq(p.full_gradient(w));
    if (denom < 1e-12) continue;
    const double ratio = p.expected_grad_sq(w) / denom;
    if (ratio > grid_max) {
      grid_max = ratio;
      best_w = w;
    }
  }
  // Coordinate ascent around the best random start.
  double step = 1.0;
  for (int round = 0; round < 200; ++round) {
    bool improved = false;
    for (std::size_t l = 0; l < 5; ++l) {
      for (double dir : {+1.0, -1.0}) {
        Vec w = best_w;
        w[l] += dir * step;
        const double denom = norm_sq(p.full_gradient(w));
        if (denom < 1e-12) continue;
        const double ratio = p.expected_grad_sq(w) / denom;
        if (ratio > grid_max * (1.0 + 1e-12)) {
          grid_max = ratio;
          best_w = w;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < 1e-9) break;
  }
  CHECK(grid_max <= *p.constants.D1 * (1.0 + 1e-9));
  CHECK(grid_max >= *p.constants.D1 * (1.0 - 1e-3));
}

TEST_CASE("cosh exemplar: values, curvature inequality, threshold inputs") {
  const auto p = make_l0l1_cosh(0.0);
  CHECK(p.value(Vec{0.0}) == 0.0);
  CHECK(p.full_gradient(Vec{0.0})[0] == 0.0);
  CHECK(std::cosh(3.0) == doctest::Approx(10.067661995777765).epsilon(1e-12));
  CHECK(std::cosh(3.0) <= 1.0 + std::abs(std::sinh(3.0)));
  CHECK(1.0 + std::abs(std::sinh(3.0)) == doctest::Approx(11.017874927409902).epsilon(1e-12));
  CHECK(*p.constants.L0 == 1.0);
  CHECK(*p.constants.L1 == 1.0);
  CHECK_FALSE(p.constants.L.has_value());
  CHECK(p.constants.f_star == 0.0);

  const auto noisy = make_l0l1_cosh(0.5);
  CHECK(*noisy.constants.D0 == 0.25);
  CHECK(*noisy.constants.D1 == 1.0);
  const Vec w{1.2};
  CHECK(noisy.expected_grad_sq(w) ==
        doctest::Approx(std::sinh(1.2) * std::sinh(1.2) + 0.25).epsilon(1e-14));
}

TEST_CASE("generator argument validation") {
  CHECK_THROWS_AS(make_twopoint_quadratic(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_twopoint_quadratic(1.0, -1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_truncated_gaussian_regression(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_interpolation_least_squares(5, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_l0l1_cosh(-0.1), std::invalid_argument);
}
