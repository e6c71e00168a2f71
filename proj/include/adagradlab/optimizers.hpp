#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adagradlab/common.hpp"
#include "adagradlab/problems.hpp"

namespace adagradlab::optim {

/// Iterate of the scalar-conditioner variant: w, accumulated squared
/// gradient norms nu (> 0, non-decreasing), step counter t.
struct NormState {
  Vec w;
  double nu = 1.0;
  std::uint64_t t = 0;
};

/// Iterate of the per-coordinate variant: nu holds one positive,
/// non-decreasing accumulator per coordinate.
struct CoordState {
  Vec w;
  Vec nu;
  std::uint64_t t = 0;
};

struct OptimizerConfig {
  double eta = 1.0;  // learning rate, > 0
  double nu0 = 1.0;  // initial conditioner, > 0 (broadcast for coordinate/rr)
};

/// One scalar-conditioner step: nu' = nu + ||g||^2, w' = w - eta*g/sqrt(nu').
/// Pure; bit-reproducible for identical inputs.
NormState adagrad_norm_step(const NormState& state, std::span<const double> g, double eta);

/// One per-coordinate step: nu_l' = nu_l + g_l^2, w_l' = w_l - eta*g_l/sqrt(nu_l').
CoordState adagrad_step(const CoordState& state, std::span<const double> g, double eta);

/// One epoch's visiting order: a permutation of {0, ..., n-1}.
struct EpochPlan {
  std::size_t n = 0;
  std::vector<std::size_t> permutation;
};

/// Throws unless plan.permutation is a permutation of {0, ..., n-1}.
void validate_plan(const EpochPlan& plan);

/// Uniform random plan (Fisher-Yates on the caller's generator).
EpochPlan sample_plan(std::size_t n, std::mt19937_64& gen);

struct InnerRecord {
  std::uint64_t epoch = 0;
  std::size_t i = 0;          // inner position, 0-based
  std::size_t component = 0;  // which component gradient was used
  Vec w;                      // inner iterate the gradient was taken at
  Vec g;
  Vec nu;  // accumulator after this inner update
};

struct EpochResult {
  CoordState state;
  std::vector<InnerRecord> inner;
};

/// One reshuffled epoch: n sequential per-coordinate steps, the i-th using
/// the gradient of component plan.permutation[i] at the current inner
/// iterate. The accumulator carries across the epoch boundary.
EpochResult rr_adagrad_epoch(const CoordState& state,
                             std::span<const problems::GradFn> components,
                             const EpochPlan& plan, double eta);

enum class Method { norm, coordinate, rr };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

/// Per-iteration record. For rr one point is emitted per epoch, taken at
/// the epoch-start iterate, with the accumulator after the full epoch.
struct TracePoint {
  std::uint64_t t = 0;
  double f = 0.0;
  double grad_norm_sq = 0.0;
  double nu_summary = 0.0;  // the scalar nu, or the sum of coordinates
  double xi = 0.0;          // grad_norm_sq / sqrt(nu_summary)
  std::optional<double> xi_coord;  // coordinate variants only
  double step_norm = 0.0;
};

struct RunResult {
  std::vector<TracePoint> points;
  std::vector<InnerRecord> inner;  // rr only
  bool aborted = false;
  std::string abort_reason;

  double running_min_grad_sq(std::size_t upto) const;  // over points[0..upto)
};

/// Deterministic driver: horizon steps (or epochs for rr) of the chosen
/// method from problem.initial_point, every randomness drawn from a stream
/// derived from `seed`. Aborts with a structured report (not an exception)
/// when |f| or ||w|| exceeds 1e300, any non-finite value appears, or the
/// objective raises a domain error.
RunResult run(const problems::Problem& problem, Method method, const OptimizerConfig& config,
              std::uint64_t horizon, std::uint64_t seed);

}  // namespace adagradlab::optim
