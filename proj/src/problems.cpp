#include "adagradlab/problems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "adagradlab/rng.hpp"

namespace adagradlab::problems {

Vec Problem::expected_gradient(std::span<const double> w) const {
  if (support.empty()) throw ConfigError("expected_gradient: problem has no finite support");
  Vec acc(dim, 0.0);
  for (const auto& atom : support) {
    Vec g = atom.outcome(w);
    for (std::size_t l = 0; l < dim; ++l) acc[l] += atom.prob * g[l];
  }
  return acc;
}

double Problem::expected_grad_sq(std::span<const double> w) const {
  if (support.empty()) throw ConfigError("expected_grad_sq: problem has no finite support");
  double acc = 0.0;
  for (const auto& atom : support) acc += atom.prob * norm_sq(atom.outcome(w));
  return acc;
}

double Problem::expected_coord_sq(std::span<const double> w, std::size_t l) const {
  if (support.empty()) throw ConfigError("expected_coord_sq: problem has no finite support");
  if (l >= dim) throw std::invalid_argument("expected_coord_sq: coordinate out of range");
  double acc = 0.0;
  for (const auto& atom : support) {
    const double gl = atom.outcome(w)[l];
    acc += atom.prob * gl * gl;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Two-point quadratic

Problem make_twopoint_quadratic(double L, double sigma, std::size_t dim) {
  require(L > 0.0, "make_twopoint_quadratic: L must be positive");
  require(sigma >= 0.0, "make_twopoint_quadratic: sigma must be nonnegative");
  require(dim >= 1, "make_twopoint_quadratic: dim must be positive");

  Problem p;
  p.name = "two_point_quadratic";
  p.dim = dim;
  p.value = [L](std::span<const double> w) { return 0.5 * L * norm_sq(w); };
  p.full_gradient = [L, dim](std::span<const double> w) {
    require_same_dim(w.size(), dim, "quadratic gradient");
    Vec g(w.begin(), w.end());
    for (double& x : g) x *= L;
    return g;
  };

  // 2*dim outcomes: one coordinate perturbed by +-sigma, each with
  // probability 1/(2*dim). Mean zero, E||g||^2 = ||Lw||^2 + sigma^2.
  const double prob = 1.0 / (2.0 * static_cast<double>(dim));
  for (std::size_t l = 0; l < dim; ++l) {
    for (double sign : {+1.0, -1.0}) {
      p.support.push_back({[L, sigma, sign, l, dim](std::span<const double> w) {
                             require_same_dim(w.size(), dim, "quadratic oracle");
                             Vec g(w.begin(), w.end());
                             for (double& x : g) x *= L;
                             g[l] += sign * sigma;
                             return g;
                           },
                           prob});
      // Matching finite-sum component: f_j(w) = (L/2)||w||^2 + sigma*sign*w_l.
      p.components.push_back(p.support.back().outcome);
    }
  }
  p.oracle = [support = p.support](std::span<const double> w, std::mt19937_64& gen) {
    std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
    return support[pick(gen)].outcome(w);
  };

  p.constants.L = L;
  p.constants.D0 = sigma * sigma;
  p.constants.D1 = 1.0;
  p.constants.f_star = 0.0;
  p.constants.coordinate_affine_holds = (dim == 1);
  p.initial_point = Vec(dim, 3.0 / std::sqrt(static_cast<double>(dim)));
  return p;
}

// ---------------------------------------------------------------------------
// Truncated-Gaussian linear regression

namespace {

double std_normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Composite Simpson of x^k * phi(x) over [-1,1] plus the clipped mass
// 2*Phi(-1) at the endpoints (k even).
double clipped_normal_moment(int k) {
  const int n = 1 << 12;
  const double h = 2.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -1.0 + h * i;
    const double f = std::pow(x, k) * std_normal_pdf(x);
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += wgt * f;
  }
  return s * h / 3.0 + 2.0 * std_normal_cdf(-1.0);
}

}  // namespace

double truncated_normal_m2() {
  static const double m2 = clipped_normal_moment(2);
  return m2;
}

double truncated_normal_m4() {
  static const double m4 = clipped_normal_moment(4);
  return m4;
}

Problem make_truncated_gaussian_regression(std::size_t dim, std::uint64_t /*seed*/) {
  require(dim >= 2, "make_truncated_gaussian_regression: dim must be >= 2");
  const double m2 = truncated_normal_m2();
  const double m4 = truncated_normal_m4();

  Problem p;
  p.name = "truncated_gaussian_regression";
  p.dim = dim;
  // Coordinates of x are independent with mean 0, so f(w) = m2 * ||w||^2.
  p.value = [m2](std::span<const double> w) { return m2 * norm_sq(w); };
  p.full_gradient = [m2, dim](std::span<const double> w) {
    require_same_dim(w.size(), dim, "regression gradient");
    Vec g(w.begin(), w.end());
    for (double& x : g) x *= 2.0 * m2;
    return g;
  };
  p.oracle = [dim](std::span<const double> w, std::mt19937_64& gen) {
    require_same_dim(w.size(), dim, "regression oracle");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec x(dim);
    for (double& xi : x) xi = std::clamp(normal(gen), -1.0, 1.0);
    const double xw = dot(x, w);
    Vec g(dim);
    for (std::size_t l = 0; l < dim; ++l) g[l] = 2.0 * x[l] * xw;
    return g;
  };

  // E||g||^2 = 4 (m4 + (dim-1) m2^2) ||w||^2, ||grad f||^2 = 4 m2^2 ||w||^2.
  p.constants.D0 = 0.0;
  p.constants.D1 = (m4 + (static_cast<double>(dim) - 1.0) * m2 * m2) / (m2 * m2);
  p.constants.f_star = 0.0;
  p.constants.coordinate_affine_holds = false;
  p.initial_point = Vec(dim, 1.0);
  return p;
}

// ---------------------------------------------------------------------------
// Interpolating least squares

Problem make_interpolation_least_squares(std::size_t n, std::size_t d, std::uint64_t seed) {
  require(n >= 1, "make_interpolation_least_squares: n must be positive");
  require(d > n, "make_interpolation_least_squares: requires d > n (over-parameterized)");

  auto gen = rng::stream(seed, /*lane=*/0x15);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto X = std::make_shared<std::vector<Vec>>(n, Vec(d));
  Vec w_star(d);
  for (double& v : w_star) v = normal(gen) / std::sqrt(static_cast<double>(d));
  auto y = std::make_shared<Vec>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : (*X)[i]) v = normal(gen);
    (*y)[i] = dot((*X)[i], w_star);
  }

  Problem p;
  p.name = "interpolation_least_squares";
  p.dim = d;
  p.value = [X, y, n, d](std::span<const double> w) {
    require_same_dim(w.size(), d, "least-squares value");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = dot((*X)[i], w) - (*y)[i];
      s += r * r;
    }
    return s / (2.0 * static_cast<double>(n));
  };
  p.full_gradient = [X, y, n, d](std::span<const double> w) {
    require_same_dim(w.size(), d, "least-squares gradient");
    Vec g(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (dot((*X)[i], w) - (*y)[i]) / static_cast<double>(n);
      for (std::size_t l = 0; l < d; ++l) g[l] += r * (*X)[i][l];
    }
    return g;
  };
  const double prob = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    GradFn comp = [X, y, i, d](std::span<const double> w) {
      require_same_dim(w.size(), d, "least-squares component");
      const double r = dot((*X)[i], w) - (*y)[i];
      Vec g(d);
      for (std::size_t l = 0; l < d; ++l) g[l] = r * (*X)[i][l];
      return g;
    };
    p.support.push_back({comp, prob});
    p.components.push_back(comp);
  }
  p.oracle = [support = p.support](std::span<const double> w, std::mt19937_64& g) {
    std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
    return support[pick(g)].outcome(w);
  };

  // Spectral constants. L is the top eigenvalue of the (1/n) X X^T Gram;
  // D1 is the exact supremum of E||g||^2 / ||grad f||^2 over all iterates,
  //   sup_r n (r^T diag(||x_i||^2) r) / (r^T X X^T r),
  // a generalized symmetric eigenproblem (every residual r is reachable
  // because X has full row rank for d > n).
  Eigen::MatrixXd Xm(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < d; ++l) Xm(i, l) = (*X)[i][l];
  Eigen::MatrixXd gram = Xm * Xm.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram / static_cast<double>(n));
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) D(i, i) = norm_sq((*X)[i]);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(D, gram);

  p.constants.L = es.eigenvalues().maxCoeff();
  p.constants.D0 = 0.0;
  p.constants.D1 = static_cast<double>(n) * ges.eigenvalues().maxCoeff();
  p.constants.f_star = 0.0;
  p.constants.coordinate_affine_holds = false;
  p.initial_point = Vec(d, 0.0);
  return p;
}

// ---------------------------------------------------------------------------
// Relaxed-smoothness exemplar

Problem make_l0l1_cosh(double sigma) {
  require(sigma >= 0.0, "make_l0l1_cosh: sigma must be nonnegative");

  Problem p;
  p.name = "l0l1_cosh";
  p.dim = 1;
  p.value = [](std::span<const double> w) { return std::cosh(w[0]) - 1.0; };
  p.full_gradient = [](std::span<const double> w) { return Vec{std::sinh(w[0])}; };
  if (sigma == 0.0) {
    p.support.push_back({p.full_gradient, 1.0});
  } else {
    for (double sign : {+1.0, -1.0}) {
      p.support.push_back({[sigma, sign](std::span<const double> w) {
                             return Vec{std::sinh(w[0]) + sign * sigma};
                           },
                           0.5});
      p.components.push_back(p.support.back().outcome);
    }
  }
  p.oracle = [support = p.support](std::span<const double> w, std::mt19937_64& g) {
    if (support.size() == 1) return support[0].outcome(w);
    std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
    return support[pick(g)].outcome(w);
  };

  p.constants.L0 = 1.0;
  p.constants.L1 = 1.0;
  p.constants.D0 = sigma * sigma;
  p.constants.D1 = 1.0;
  p.constants.f_star = 0.0;
  p.constants.coordinate_affine_holds = true;
  p.initial_point = Vec{2.0};
  return p;
}

}  // namespace adagradlab::problems
