#include <doctest.h>

#include <cmath>

#include "adagradlab/diagnostics.hpp"
#include "adagradlab/optimizers.hpp"
#include "adagradlab/problems.hpp"
#include "adagradlab/rng.hpp"

using namespace adagradlab;
using namespace adagradlab::diag;

TEST_CASE("xi") {
  CHECK(xi(25.0, 25.0) == 5.0);
  CHECK(xi(0.0, 3.7) == 0.0);
  const double c = 4.2, s = 1.3, nu = 0.9;
  CHECK(xi(c * s, nu) == doctest::Approx(c * xi(s, nu)).epsilon(1e-15));
  CHECK_THROWS_AS(xi(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(xi(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("xi_hat") {
  CHECK(xi_hat(2.0, 3.0, 36.0) == 1.0);
  CHECK(xi_hat(0.0, 5.0, 2.0) == 0.0);
  CHECK(xi_hat(1.7, 1.7, 3.3) == doctest::Approx(xi(1.7 * 1.7, 3.3)).epsilon(1e-15));
  CHECK_THROWS_AS(xi_hat(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("xi_coord") {
  CHECK(xi_coord(Vec{1.0, 2.0}, Vec{4.0, 16.0}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(xi_coord(Vec{0.0, 0.0, 0.0}, Vec{1.0, 2.0, 3.0}) == 0.0);
  const Vec partials{0.3, -1.1, 0.8};
  const double nu = 2.7;
  CHECK(xi_coord(partials, Vec{nu, nu, nu}) ==
        doctest::Approx(xi(norm_sq(partials), nu)).epsilon(1e-14));
  CHECK_THROWS_AS(xi_coord(Vec{1.0}, Vec{1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(xi_coord(Vec{1.0}, Vec{0.0}), std::invalid_argument);
}

TEST_CASE("bound constants match the worked example") {
  const auto c = compute_bound_constants(1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(c.C1 == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(c.C2 == 2.0);
  CHECK(c.C3 == doctest::Approx(309.70728309768726).epsilon(1e-14));
  CHECK(c.C3 >= 2.0 * std::sqrt(1.0));

  CHECK(compute_bound_constants(1.0, 0.0, 0.5, 2.0, 1.0, 1.0, 1.0, 1.0).C2 == 2.0);

  // nu0 = 1 removes the log contribution: C1 equals the expansion without it.
  const double eta = 0.7, L = 3.0, D0 = 0.2, D1 = 1.5, g0 = 2.0;
  const auto k = compute_bound_constants(2.0, -1.0, eta, L, D0, D1, 1.0, g0);
  const double leta = L * eta;
  const double expected =
      4.0 *
      (2.0 - (-1.0) + 0.5 * eta * D1 * g0 +
       (2.0 * eta * leta * D1 * leta * D1 + eta * D1 * leta * leta + 0.5 * eta * D0)) /
      eta;
  CHECK(k.C1 == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(compute_bound_constants(1, 0, 0.0, 1, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(compute_bound_constants(1, 0, 1, -1, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(compute_bound_constants(1, 0, 1, 1, 1, 0.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(compute_bound_constants(1, 0, 1, 1, 1, 1, 0.0, 1), std::invalid_argument);
}

TEST_CASE("high-probability bound right-hand side") {
  const auto c = compute_bound_constants(1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);

  // D0 = 0 drops the 1/sqrt(T) term entirely.
  const double t1 = high_prob_bound_rhs(c, 1000, 0.5, 0.0);
  const double expected_d0_zero =
      c.C3 * (c.C1 + 2.0 * c.C2 * std::log(c.C3)) / (1000.0 * 0.25);
  CHECK(t1 == doctest::Approx(expected_d0_zero).epsilon(1e-14));
  CHECK(high_prob_bound_rhs(c, 2000, 0.5, 0.0) == doctest::Approx(t1 / 2.0).epsilon(1e-12));

  // Monotone decay in T when D0 > 0.
  CHECK(high_prob_bound_rhs(c, 20000, 0.5, 1.0) < high_prob_bound_rhs(c, 10000, 0.5, 1.0));

  // Frozen evaluation of the full expression.
  CHECK(high_prob_bound_rhs(c, 10000, 0.5, 1.0) ==
        doctest::Approx(10.793355291322898).epsilon(1e-12));

  CHECK_THROWS_AS(high_prob_bound_rhs(c, 100, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(high_prob_bound_rhs(c, 100, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("relaxed learning-rate threshold") {
  CHECK(relaxed_eta_threshold(1.0, 1.0) == doctest::Approx(1.0 / 64.0).epsilon(1e-15));
  CHECK(relaxed_eta_threshold(2.0, 1.0) == doctest::Approx(1.0 / 128.0).epsilon(1e-15));
  // Small D1 switches the binding term to 1/(8 sqrt(D1)).
  CHECK(relaxed_eta_threshold(1.0, 0.01) == doctest::Approx(1.0 / (8.0 * 0.1)).epsilon(1e-15));
}

TEST_CASE("one-step error bound: pinned enumeration") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 1.0, 1);
  const auto gap = lemma1_gap(Vec{1.0}, 1.0, 1.0, quad, 0.5);
  CHECK(gap.lhs == doctest::Approx(0.27639320225002105).epsilon(1e-14));
  CHECK(gap.rhs == doctest::Approx(0.6793440519687684).epsilon(1e-14));
  CHECK(gap.lhs <= gap.rhs);
}

TEST_CASE("one-step error bound: degenerate cases and validation") {
  const auto noiseless = problems::make_twopoint_quadratic(1.0, 0.0, 1);
  const auto zero = lemma1_gap(Vec{0.0}, 1.5, 0.0, noiseless, 0.8);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs >= 0.0);

  const auto quad = problems::make_twopoint_quadratic(1.0, 1.0, 1);
  const auto off = lemma1_gap(Vec{1.0}, 1.0, 1.0, quad, 0.0);
  CHECK(off.lhs == 0.0);
  CHECK(off.rhs == 0.0);

  const auto tg = problems::make_truncated_gaussian_regression(3, 1);
  CHECK_THROWS_AS(lemma1_gap(Vec{1.0, 0.0, 0.0}, 1.0, 1.0, tg, 0.5), ConfigError);
  const auto cosh_p = problems::make_l0l1_cosh(1.0);  // no uniform L
  CHECK_THROWS_AS(lemma1_gap(Vec{1.0}, 1.0, 1.0, cosh_p, 0.5), ConfigError);
  CHECK_THROWS_AS(lemma1_gap(Vec{1.0}, 0.0, 1.0, quad, 0.5), std::invalid_argument);
}

TEST_CASE("one-step error bound: literal previous-iterate indexing differs") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 1.0, 1);
  const auto standalone = lemma1_gap(Vec{1.0}, 2.0, 1.0, quad, 0.5);
  const auto literal = lemma1_gap(Vec{1.0}, 2.0, 1.0, quad, 0.5, 4.0);
  CHECK(literal.rhs > standalone.rhs);  // bigger xi(t-1) only adds slack here
  CHECK(literal.lhs == standalone.lhs);
}

TEST_CASE("series bounds: pinned all-ones sequence") {
  const auto b = series_bounds_check(Vec{1.0, 1.0, 1.0, 1.0});
  const double p1 = std::pow(2.0, -1.5) + std::pow(3.0, -1.5) + std::pow(4.0, -1.5);
  CHECK(b.power_three_halves.lhs == doctest::Approx(p1).epsilon(1e-15));
  CHECK(b.power_three_halves.rhs == 2.0);
  CHECK(b.ratio.lhs == doctest::Approx(1.0 / 2 + 1.0 / 3 + 1.0 / 4).epsilon(1e-15));
  CHECK(b.ratio.rhs == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(b.mixed.lhs == doctest::Approx(0.21554294962382671).epsilon(1e-14));
  CHECK(b.mixed.rhs == 1.0);
  CHECK(b.power_three_halves.holds());
  CHECK(b.ratio.holds());
  CHECK(b.mixed.holds());
}

TEST_CASE("series bounds: argument validation and zero tail") {
  CHECK_THROWS_AS(series_bounds_check(Vec{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(series_bounds_check(Vec{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(series_bounds_check(Vec{1.0, -0.5}), std::invalid_argument);
  const auto z = series_bounds_check(Vec{3.0, 0.0, 0.0});
  CHECK(z.power_three_halves.lhs == 0.0);
  CHECK(z.ratio.lhs == 0.0);
  CHECK(z.mixed.lhs == 0.0);
}

TEST_CASE("series bounds hold on random sequences") {
  auto gen = rng::stream(123);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    std::uniform_int_distribution<std::size_t> u_len(2, 200);
    Vec a(u_len(gen));
    for (double& v : a) v = std::abs(normal(gen));
    a[0] = std::max(a[0], 1e-8);
    const auto b = series_bounds_check(a);
    CHECK(b.power_three_halves.holds());
    CHECK(b.ratio.holds());
    CHECK(b.mixed.holds());
  }
}

TEST_CASE("descent residuals") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 0.0, 1);
  CHECK(descent_residual_uniform(quad.value, quad.full_gradient, Vec{2.0}, Vec{0.0}, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(descent_residual_uniform(quad.value, quad.full_gradient, Vec{0.7}, Vec{0.7}, 1.0) ==
        0.0);

  const auto cosh_p = problems::make_l0l1_cosh(0.0);
  CHECK(descent_residual_relaxed(cosh_p.value, cosh_p.full_gradient, Vec{0.3}, Vec{0.3},
                                 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(descent_residual_relaxed(cosh_p.value, cosh_p.full_gradient, Vec{2.0},
                                           Vec{0.0}, 1.0, 1.0),
                  std::invalid_argument);

  // The (1,1) ball certificate genuinely fails for cosh at the origin:
  // the residual there is cosh(u) - 1 - u^2/2 = u^4/24 + O(u^6) > 0.
  const double r = descent_residual_relaxed(cosh_p.value, cosh_p.full_gradient, Vec{1.0},
                                            Vec{0.0}, 1.0, 1.0);
  CHECK(r == doctest::Approx(std::cosh(1.0) - 1.5).epsilon(1e-12));
  CHECK(r > 0.0);
  const double r_small = descent_residual_relaxed(cosh_p.value, cosh_p.full_gradient,
                                                  Vec{0.01}, Vec{0.0}, 1.0, 1.0);
  CHECK(r_small == doctest::Approx(1e-8 / 24.0).epsilon(1e-3));
}

TEST_CASE("rate fitting") {
  const RatePoint exact[] = {{10, 0.1}, {100, 0.01}, {1000, 0.001}};
  const auto f1 = fit_rate(exact);
  CHECK(f1.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f1.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const double c = 0.37;
  const RatePoint half[] = {
      {10, c / std::sqrt(10.0)}, {100, c / 10.0}, {1000, c / std::sqrt(1000.0)}};
  CHECK(fit_rate(half).slope == doctest::Approx(-0.5).epsilon(1e-12));

  const RatePoint flat[] = {{10, 2.5}, {100, 2.5}, {1000, 2.5}};
  const auto f3 = fit_rate(flat);
  CHECK(f3.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f3.r_squared == 1.0);

  const RatePoint too_few[] = {{10, 1.0}, {100, 0.1}};
  CHECK_THROWS_AS(fit_rate(too_few), std::invalid_argument);
  const RatePoint bad_y[] = {{10, 1.0}, {100, 0.0}, {1000, 0.1}};
  CHECK_THROWS_AS(fit_rate(bad_y), std::invalid_argument);
}

TEST_CASE("xi telescopes along a scalar-conditioner trace") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 1.0, 2);
  const auto r = optim::run(quad, optim::Method::norm, {0.5, 1.0}, 500, 9);
  REQUIRE(r.points.size() == 500);
  const double xi0 = r.points.front().grad_norm_sq / std::sqrt(1.0);
  double sum = 0.0;
  double prev = xi0;
  for (const auto& pt : r.points) {
    sum += prev - pt.xi;
    prev = pt.xi;
  }
  const double expected = xi0 - r.points.back().xi;
  CHECK(sum == doctest::Approx(expected).epsilon(1e-9));
}
