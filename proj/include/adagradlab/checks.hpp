#pragma once

#include <cstdint>
#include <string>

#include "adagradlab/problems.hpp"
#include "adagradlab/zigzag.hpp"

namespace adagradlab::harness {

/// Step-by-step replay of the scalar-conditioner method on the zigzag
/// problem from (0,0) with nu0 = 1, checked against the closed forms:
/// gradient norms 2^k, the corner pattern in the partial sums S, the
/// forced accumulator nu_k = (4^{k+1}-1)/3, and the corner objective
/// values (2^{k+1}-2)/L1.
struct ZigzagTrajectoryCheck {
  int k_max = 0;
  bool norms_ok = false;
  bool corners_ok = false;
  bool nu_ok = false;
  bool values_ok = false;
  double max_norm_rel_err = 0.0;
  double max_corner_rel_err = 0.0;
  double max_nu_rel_err = 0.0;
  double max_value_rel_err = 0.0;
  bool ok() const { return norms_ok && corners_ok && nu_ok && values_ok; }
};

ZigzagTrajectoryCheck zigzag_trajectory_check(double eta, double L1, int k_max);

/// Random-state sweep of the one-step error-term bound on a finite-support
/// problem: draws (w, nu_prev, g_prev^2, eta) and records the worst
/// lhs - rhs.
struct Lemma1Sweep {
  std::size_t n_states = 0;
  double max_gap = 0.0;
  bool pass = false;  // max_gap <= 1e-12
};

Lemma1Sweep lemma1_random_states(const problems::Problem& problem, std::size_t n_states,
                                 std::uint64_t seed);

/// Literal trajectory indexing: walks an actual scalar-conditioner run and
/// checks the bound with xi(t-1) taken at the previous iterate.
Lemma1Sweep lemma1_along_trajectory(const problems::Problem& problem, std::size_t steps,
                                    double eta, std::uint64_t seed);

struct SeriesSweep {
  std::size_t n_sequences = 0;
  double max_gap = 0.0;
  bool pass = false;
};

SeriesSweep lemma2_random_sequences(std::size_t n_sequences, std::uint64_t seed);

/// Descent-residual sweeps. `literal` expands around w2 as drawn;
/// `max_anchored` expands around the endpoint with the larger gradient;
/// `hypothesis_checked` keeps only pairs where the relaxed Lipschitz
/// hypothesis holds along the segment; `short_pairs` caps the distance at
/// 1e-3.
enum class DescentVariant { literal, max_anchored, hypothesis_checked, short_pairs };

struct DescentSweep {
  std::size_t n_pairs = 0;
  std::size_t n_used = 0;
  std::size_t violations = 0;  // residual > 1e-12 (1e-9 for hypothesis_checked)
  double max_residual = 0.0;
  bool pass = false;
};

DescentSweep descent_quadratic_sweep(std::size_t pairs, std::uint64_t seed);
DescentSweep descent_cosh_sweep(std::size_t pairs, std::uint64_t seed, DescentVariant variant);

/// Uniform on-path pairs within distance 1/L1, checked against the
/// strengthened form ||grad(w1)-grad(w2)|| <=
/// L1 * min(||grad(w1)||, ||grad(w2)||) * ||w1-w2||.
struct OnPathSmoothnessSweep {
  std::size_t n_pairs = 0;
  double max_excess = 0.0;  // worst lhs - rhs, relative to rhs scale
  bool pass = false;
};

OnPathSmoothnessSweep zigzag_onpath_smoothness(const problems::ZigzagGeometry& geom,
                                               std::size_t pairs, std::uint64_t seed,
                                               std::size_t use_segments = 0);

}  // namespace adagradlab::harness
