#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "adagradlab/common.hpp"
#include "adagradlab/parallel.hpp"
#include "adagradlab/problems.hpp"

namespace adagradlab::checkers {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of E[||g(w)||^2] (or E[g_coord^2] when coord is
/// set). Samples are drawn in fixed blocks, each block from its own
/// derived stream, so the result is bitwise identical for the serial and
/// OpenMP policies.
McEstimate mc_second_moment(const problems::Problem& problem, std::span<const double> w,
                            std::size_t samples, std::uint64_t seed, std::uint64_t lane,
                            std::optional<std::size_t> coord = std::nullopt,
                            par::Policy policy = par::Policy::openmp);

/// Smallest nonnegative (D0, D1) certificate for the affine noise bound
/// over the probes: minimizes D0 + D1 * median(||grad f||^2) subject to
/// E||g||^2 <= D0 + D1 ||grad f||^2 at every probe (a two-variable linear
/// program, solved exactly by vertex enumeration). Expectations are exact
/// on finite-support problems, Monte-Carlo otherwise.
struct AffineFit {
  double D0_hat = 0.0;
  double D1_hat = 0.0;
  double max_violation = 0.0;  // largest E||g||^2 - (D0_hat + D1_hat ||grad f||^2)
  std::size_t n_probes = 0;
};

AffineFit estimate_affine_constants(const problems::Problem& problem,
                                    std::span<const Vec> probes,
                                    std::size_t samples_per_probe, std::uint64_t seed,
                                    par::Policy policy = par::Policy::openmp);

/// Per-probe ratios E[g_coord^2] / (partial_coord f)^2 along a path.
/// Probes where the partial derivative vanishes get a +inf sentinel and
/// the run continues.
struct CoordinateRatioReport {
  std::vector<double> ratios;
  std::vector<double> second_moments;
  std::vector<double> partial_sq;
  bool strictly_increasing = false;
};

CoordinateRatioReport check_coordinate_affine(const problems::Problem& problem,
                                              std::size_t coord,
                                              std::span<const Vec> probe_path,
                                              std::size_t samples, std::uint64_t seed,
                                              par::Policy policy = par::Policy::openmp);

/// Axis-aligned sampling region; every edge must have positive length.
struct Box {
  Vec lo;
  Vec hi;
};

/// max over sampled pairs of ||grad f(w1) - grad f(w2)|| / ||w1 - w2||.
double estimate_smoothness_uniform(const problems::GradFn& grad, const Box& region,
                                   std::size_t pairs, std::uint64_t seed);

/// Draws (w1, w2) with ||w1 - w2|| <= max_dist.
using PairSampler = std::function<std::pair<Vec, Vec>(std::mt19937_64&, double max_dist)>;

struct RelaxedFit {
  double L0_hat = 0.0;
  double L1_hat = 0.0;
  double max_residual = 0.0;  // largest ratio - (L0_hat + L1_hat ||grad f(w1)||)
  int rounds = 0;
};

/// Fits ||grad f(w1) - grad f(w2)|| / ||w1 - w2|| against ||grad f(w1)||
/// over pairs inside the 1/L1_guess ball, with the guess iterated to a
/// fixed point (at most 5 rounds). The line is the nonnegative
/// least-squares fit constrained to dominate every sampled ratio, so
/// (L0_hat, L1_hat) is a valid certificate for the sample and max_residual
/// is its (nonpositive) slack.
RelaxedFit estimate_smoothness_relaxed(const problems::GradFn& grad, const PairSampler& sampler,
                                       std::size_t pairs, std::uint64_t seed,
                                       double initial_L1_guess = 1.0);

/// Box-sampling convenience overload.
RelaxedFit estimate_smoothness_relaxed(const problems::GradFn& grad, const Box& region,
                                       std::size_t pairs, std::uint64_t seed,
                                       double initial_L1_guess = 1.0);

}  // namespace adagradlab::checkers
