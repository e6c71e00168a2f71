#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "adagradlab/common.hpp"

namespace adagradlab::problems {

/// Constants a generated problem certifies about itself. Absent optionals
/// mean the assumption does not hold (or is not certified) for the problem.
struct AssumptionConstants {
  std::optional<double> L;   // gradient Lipschitz constant
  std::optional<double> D0;  // affine noise variance, additive part
  std::optional<double> D1;  // affine noise variance, multiplicative part
  std::optional<double> L0;  // relaxed smoothness, additive part
  std::optional<double> L1;  // relaxed smoothness, gradient-growth part
  double f_star = 0.0;       // lower bound on f
  bool coordinate_affine_holds = false;
};

using ValueFn = std::function<double(std::span<const double>)>;
using GradFn = std::function<Vec(std::span<const double>)>;
using OracleFn = std::function<Vec(std::span<const double>, std::mt19937_64&)>;

/// One outcome of a finite-support stochastic gradient.
struct SupportAtom {
  GradFn outcome;
  double prob;
};

/// An objective with a stochastic gradient oracle. Immutable after
/// construction; oracle calls draw from a caller-owned generator, so a
/// Problem can be shared across threads freely.
struct Problem {
  std::string name;
  std::size_t dim = 0;
  ValueFn value;
  GradFn full_gradient;
  OracleFn oracle;
  /// Finite noise support enabling exact conditional expectations; empty
  /// when the oracle's distribution is continuous.
  std::vector<SupportAtom> support;
  /// Finite-sum component gradients (uniform weights) for random
  /// reshuffling; empty when the objective has no finite-sum form.
  std::vector<GradFn> components;
  AssumptionConstants constants;
  Vec initial_point;

  bool has_support() const { return !support.empty(); }

  /// Exact E[g | w] by support enumeration.
  Vec expected_gradient(std::span<const double> w) const;
  /// Exact E[||g||^2 | w] by support enumeration.
  double expected_grad_sq(std::span<const double> w) const;
  /// Exact E[g_l^2 | w] by support enumeration.
  double expected_coord_sq(std::span<const double> w, std::size_t l) const;
};

/// f(w) = (L/2)||w||^2 with oracle g = Lw + sigma*zeta, zeta uniform on
/// {+-e_l}: finite support of 2*dim outcomes. Certifies L, D0 = sigma^2,
/// D1 = 1 exactly.
Problem make_twopoint_quadratic(double L, double sigma, std::size_t dim);

/// f(w) = E(<w,x>)^2 with x coordinatewise standard normal clipped to
/// [-1,1]; oracle g(w) = 2 x x^T w. The full-norm affine bound holds with
/// D0 = 0 and an exact fourth-moment D1, but the coordinate-wise bound
/// fails (the certified flag is false).
Problem make_truncated_gaussian_regression(std::size_t dim, std::uint64_t seed);

/// Over-parameterized least squares (d > n) with targets y = X w*, so the
/// minimum is 0 and every component gradient vanishes there (strong
/// growth: D0 = 0). L and D1 are exact spectral constants.
Problem make_interpolation_least_squares(std::size_t n, std::size_t d, std::uint64_t seed);

/// One-dimensional f(w) = cosh(w) - 1 with f'' = cosh <= 1 + |sinh| =
/// L0 + L1|f'|, (L0, L1) = (1, 1); not uniformly smooth. Optional two-point
/// additive noise of scale sigma (D0 = sigma^2, D1 = 1).
Problem make_l0l1_cosh(double sigma = 0.0);

/// Truncated standard normal coordinate moments E[x^2], E[x^4] (clipping at
/// +-1), computed by quadrature. Exposed for cross-checking.
double truncated_normal_m2();
double truncated_normal_m4();

}  // namespace adagradlab::problems
