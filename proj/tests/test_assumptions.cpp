#include <doctest.h>

#include <cmath>

#include "adagradlab/assumption_checkers.hpp"
#include "adagradlab/problems.hpp"
#include "adagradlab/rng.hpp"

using namespace adagradlab;
using namespace adagradlab::checkers;

TEST_CASE("affine fit recovers the exact constants of a tight problem") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 1.0, 1);
  const std::vector<Vec> probes = {{1.0}, {-1.0}, {2.0}, {-2.0}, {3.0}, {-3.0}};
  const auto fit = estimate_affine_constants(quad, probes, 0, 1);
  CHECK(fit.D0_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.D1_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.max_violation <= 1e-9);
  CHECK(fit.n_probes == 6);
}

TEST_CASE("affine fit of a deterministic oracle is (0, 1)") {
  const auto det = problems::make_twopoint_quadratic(1.0, 0.0, 2);
  std::vector<Vec> probes;
  auto gen = rng::stream(6);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int i = 0; i < 8; ++i) probes.push_back(Vec{normal(gen), normal(gen)});
  const auto fit = estimate_affine_constants(det, probes, 0, 2);
  CHECK(fit.D0_hat <= 1e-12);
  CHECK(fit.D1_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fitted constants never exceed certified ones (exact problems)") {
  auto gen = rng::stream(17);
  std::normal_distribution<double> normal(0.0, 2.5);
  const auto quad = problems::make_twopoint_quadratic(2.0, 0.7, 3);
  std::vector<Vec> probes;
  for (int i = 0; i < 12; ++i) probes.push_back(Vec{normal(gen), normal(gen), normal(gen)});
  const auto fit = estimate_affine_constants(quad, probes, 0, 3);
  CHECK(fit.D0_hat <= *quad.constants.D0 + 1e-9);
  CHECK(fit.D1_hat <= *quad.constants.D1 + 1e-9);
  CHECK(fit.max_violation <= 1e-9);
}

TEST_CASE("affine fit argument validation") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 1.0, 1);
  const std::vector<Vec> too_few = {{1.0}, {2.0}, {3.0}, {4.0}};
  CHECK_THROWS_AS(estimate_affine_constants(quad, too_few, 0, 1), std::invalid_argument);
  const std::vector<Vec> identical(6, Vec{1.0});
  CHECK_THROWS_AS(estimate_affine_constants(quad, identical, 0, 1), std::invalid_argument);
}

TEST_CASE("coordinate ratios: sentinel and bounded path") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 1.0, 1);
  const std::vector<Vec> with_zero = {{0.0}, {1.0}};
  const auto rep = check_coordinate_affine(quad, 0, with_zero, 0, 1);
  CHECK(std::isinf(rep.ratios[0]));
  CHECK(rep.ratios[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(rep.strictly_increasing);
  CHECK_THROWS_AS(check_coordinate_affine(quad, 5, with_zero, 0, 1), std::invalid_argument);
}

TEST_CASE("coordinate ratios grow along the stretched path") {
  const auto tg = problems::make_truncated_gaussian_regression(5, 1);
  std::vector<Vec> path;
  for (double M : {1.0, 10.0, 100.0}) path.push_back(Vec{0.1, M, 0.0, 0.0, 0.0});
  const auto rep = check_coordinate_affine(tg, 0, path, 200000, 5);
  CHECK(rep.strictly_increasing);
  // Analytic ratio: m4/m2^2 + (||w||^2 - w_1^2)/w_1^2.
  const double m2 = problems::truncated_normal_m2();
  const double m4 = problems::truncated_normal_m4();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double M = path[i][1];
    const double analytic = m4 / (m2 * m2) + (M * M) / 0.01;
    CHECK(rep.ratios[i] == doctest::Approx(analytic).epsilon(0.05));
  }
}

TEST_CASE("uniform smoothness estimate is exact for quadratics and scales") {
  const auto quad = problems::make_twopoint_quadratic(1.0, 0.0, 2);
  const Box box{Vec{-10.0, -10.0}, Vec{10.0, 10.0}};
  const double L1 = estimate_smoothness_uniform(quad.full_gradient, box, 500, 4);
  CHECK(L1 == doctest::Approx(1.0).epsilon(1e-9));
  for (double c : {2.0, 10.0}) {
    problems::GradFn scaled = [c, &quad](std::span<const double> w) {
      Vec g = quad.full_gradient(w);
      for (double& x : g) x *= c;
      return g;
    };
    CHECK(estimate_smoothness_uniform(scaled, box, 500, 4) ==
          doctest::Approx(c * L1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(estimate_smoothness_uniform(quad.full_gradient,
                                              Box{Vec{1.0, 0.0}, Vec{1.0, 2.0}}, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("relaxed smoothness estimate lands near (1,1) for cosh") {
  const auto cosh_p = problems::make_l0l1_cosh(0.0);
  const Box box{Vec{-4.0}, Vec{4.0}};
  const auto fit = estimate_smoothness_relaxed(cosh_p.full_gradient, box, 4000, 21);
  CHECK(std::abs(fit.L0_hat - 1.0) <= 0.1);
  CHECK(std::abs(fit.L1_hat - 1.0) <= 0.1);
  CHECK(fit.max_residual <= 1e-12);  // the fitted line is a certificate
  CHECK(fit.rounds >= 1);
  CHECK(fit.rounds <= 5);
}

TEST_CASE("Monte-Carlo estimates are identical across execution policies") {
  const auto tg = problems::make_truncated_gaussian_regression(4, 1);
  const Vec w{0.5, -1.0, 2.0, 0.25};
  const auto serial = mc_second_moment(tg, w, 50000, 7, 3, std::nullopt, par::Policy::serial);
  const auto openmp = mc_second_moment(tg, w, 50000, 7, 3, std::nullopt, par::Policy::openmp);
  CHECK(serial.mean == openmp.mean);
  CHECK(serial.std_error == openmp.std_error);
}
