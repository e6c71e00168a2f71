#include "adagradlab/assumption_checkers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "adagradlab/rng.hpp"

namespace adagradlab::checkers {

McEstimate mc_second_moment(const problems::Problem& problem, std::span<const double> w,
                            std::size_t samples, std::uint64_t seed, std::uint64_t lane,
                            std::optional<std::size_t> coord, par::Policy policy) {
  require(samples >= 2, "mc_second_moment: need at least 2 samples");
  constexpr std::size_t kBlock = 4096;
  const std::size_t n_blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> sum(n_blocks, 0.0), sum_sq(n_blocks, 0.0);
  const Vec point(w.begin(), w.end());
  par::for_each_index(
      n_blocks,
      [&](std::size_t b) {
        auto gen = rng::stream(seed, lane, b);
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(samples, lo + kBlock);
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          const Vec g = problem.oracle(point, gen);
          double v;
          if (coord) {
            const double gl = g[*coord];
            v = gl * gl;
          } else {
            v = norm_sq(g);
          }
          s += v;
          s2 += v * v;
        }
        sum[b] = s;
        sum_sq[b] = s2;
      },
      policy);
  double total = 0.0, total_sq = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    total += sum[b];
    total_sq += sum_sq[b];
  }
  const double n = static_cast<double>(samples);
  McEstimate est;
  est.mean = total / n;
  const double var = std::max(0.0, (total_sq / n - est.mean * est.mean) * n / (n - 1.0));
  est.std_error = std::sqrt(var / n);
  return est;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool feasible(double d0, double d1, std::span<const double> G, std::span<const double> E) {
  if (!(d0 >= -1e-15 && d1 >= -1e-15)) return false;
  for (std::size_t i = 0; i < G.size(); ++i) {
    const double slack = 1e-12 * std::max(1.0, std::abs(E[i]));
    if (E[i] > d0 + d1 * G[i] + slack) return false;
  }
  return true;
}

// Smallest nonnegative (intercept, slope) with intercept + slope*x_i >= y_i
// at every sample, minimizing intercept + slope * median(x): a two-variable
// linear program solved exactly by vertex enumeration. The fitted line is a
// valid certificate for the sample.
std::pair<double, double> minimax_certificate(std::span<const double> x,
                                              std::span<const double> y) {
  const double med = median(std::vector<double>(x.begin(), x.end()));
  const double inf = std::numeric_limits<double>::infinity();
  double best_obj = inf, best_a = 0.0, best_b = 0.0;
  auto consider = [&](double a, double b) {
    a = std::max(a, 0.0);
    b = std::max(b, 0.0);
    if (!feasible(a, b, x, y)) return;
    const double obj = a + b * med;
    if (obj < best_obj) {
      best_obj = obj;
      best_a = a;
      best_b = b;
    }
  };
  consider(*std::max_element(y.begin(), y.end()), 0.0);
  double max_ratio = 0.0;
  bool ratio_ok = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0)
      max_ratio = std::max(max_ratio, y[i] / x[i]);
    else if (y[i] > 0.0)
      ratio_ok = false;
  }
  if (ratio_ok) consider(0.0, max_ratio);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      if (std::abs(dx) < 1e-14 * std::max(1.0, std::max(std::abs(x[i]), std::abs(x[j]))))
        continue;
      const double b = (y[i] - y[j]) / dx;
      consider(y[i] - b * x[i], b);
    }
  }
  if (!std::isfinite(best_obj))
    throw std::logic_error("minimax certificate: no feasible line found");
  return {best_a, best_b};
}

}  // namespace

AffineFit estimate_affine_constants(const problems::Problem& problem,
                                    std::span<const Vec> probes,
                                    std::size_t samples_per_probe, std::uint64_t seed,
                                    par::Policy policy) {
  require(probes.size() >= 5, "estimate_affine_constants: need at least 5 probes");
  bool all_identical = true;
  for (std::size_t i = 1; i < probes.size() && all_identical; ++i)
    all_identical = (probes[i] == probes[0]);
  if (all_identical)
    throw std::invalid_argument("estimate_affine_constants: degenerate probes (all identical)");

  const std::size_t n = probes.size();
  std::vector<double> G(n), E(n);
  for (std::size_t i = 0; i < n; ++i) {
    G[i] = norm_sq(problem.full_gradient(probes[i]));
    E[i] = problem.has_support()
               ? problem.expected_grad_sq(probes[i])
               : mc_second_moment(problem, probes[i], samples_per_probe, seed, i,
                                  std::nullopt, policy)
                     .mean;
  }

  const auto [d0, d1] = minimax_certificate(G, E);
  AffineFit fit;
  fit.D0_hat = d0;
  fit.D1_hat = d1;
  fit.n_probes = n;
  fit.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    fit.max_violation = std::max(fit.max_violation, E[i] - (d0 + d1 * G[i]));
  return fit;
}

CoordinateRatioReport check_coordinate_affine(const problems::Problem& problem,
                                              std::size_t coord,
                                              std::span<const Vec> probe_path,
                                              std::size_t samples, std::uint64_t seed,
                                              par::Policy policy) {
  require(coord < problem.dim, "check_coordinate_affine: coordinate out of range");
  require(!probe_path.empty(), "check_coordinate_affine: empty probe path");
  CoordinateRatioReport rep;
  for (std::size_t i = 0; i < probe_path.size(); ++i) {
    const double partial = problem.full_gradient(probe_path[i])[coord];
    const double p2 = partial * partial;
    const double m2 = problem.has_support()
                          ? problem.expected_coord_sq(probe_path[i], coord)
                          : mc_second_moment(problem, probe_path[i], samples, seed,
                                             0x100 + i, coord, policy)
                                .mean;
    rep.partial_sq.push_back(p2);
    rep.second_moments.push_back(m2);
    rep.ratios.push_back(p2 > 0.0 ? m2 / p2 : std::numeric_limits<double>::infinity());
  }
  rep.strictly_increasing = true;
  for (std::size_t i = 0; i + 1 < rep.ratios.size(); ++i)
    if (!(rep.ratios[i] < rep.ratios[i + 1])) rep.strictly_increasing = false;
  return rep;
}

namespace {

void validate_box(const Box& region) {
  require(!region.lo.empty() && region.lo.size() == region.hi.size(),
          "smoothness estimate: malformed region");
  for (std::size_t l = 0; l < region.lo.size(); ++l)
    require(region.hi[l] > region.lo[l], "smoothness estimate: region has zero measure");
}

Vec uniform_in_box(const Box& region, std::mt19937_64& gen) {
  Vec w(region.lo.size());
  for (std::size_t l = 0; l < w.size(); ++l) {
    std::uniform_real_distribution<double> u(region.lo[l], region.hi[l]);
    w[l] = u(gen);
  }
  return w;
}

struct FitAccum {
  std::vector<double> x;  // ||grad f(w1)||
  std::vector<double> y;  // ||grad f(w1) - grad f(w2)|| / ||w1 - w2||
};

}  // namespace

double estimate_smoothness_uniform(const problems::GradFn& grad, const Box& region,
                                   std::size_t pairs, std::uint64_t seed) {
  validate_box(region);
  require(pairs >= 1, "estimate_smoothness_uniform: need at least one pair");
  auto gen = rng::stream(seed, 0x51);
  double best = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Vec w1 = uniform_in_box(region, gen);
    const Vec w2 = uniform_in_box(region, gen);
    Vec d(w1.size());
    for (std::size_t l = 0; l < d.size(); ++l) d[l] = w1[l] - w2[l];
    const double dist = norm(d);
    if (dist < 1e-12) continue;
    const Vec g1 = grad(w1), g2 = grad(w2);
    Vec dg(g1.size());
    for (std::size_t l = 0; l < dg.size(); ++l) dg[l] = g1[l] - g2[l];
    best = std::max(best, norm(dg) / dist);
  }
  return best;
}

RelaxedFit estimate_smoothness_relaxed(const problems::GradFn& grad, const PairSampler& sampler,
                                       std::size_t pairs, std::uint64_t seed,
                                       double initial_L1_guess) {
  require(pairs >= 8, "estimate_smoothness_relaxed: need at least 8 pairs");
  require(initial_L1_guess > 0.0, "estimate_smoothness_relaxed: guess must be positive");
  RelaxedFit fit;
  double guess = initial_L1_guess;
  for (int round = 0; round < 5; ++round) {
    auto gen = rng::stream(seed, 0x52, static_cast<std::uint64_t>(round));
    // Chords are kept well inside the admissible ball (a twentieth of the
    // radius) so the fitted growth law reflects local Lipschitz behavior
    // rather than curvature accumulated across the ball.
    const double max_dist = 0.05 / guess;
    FitAccum acc;
    acc.x.reserve(pairs);
    acc.y.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
      auto [w1, w2] = sampler(gen, max_dist);
      Vec d(w1.size());
      for (std::size_t l = 0; l < d.size(); ++l) d[l] = w1[l] - w2[l];
      const double dist = norm(d);
      if (dist < 1e-12 || dist > max_dist * (1.0 + 1e-9)) continue;
      const Vec g1 = grad(w1), g2 = grad(w2);
      Vec dg(g1.size());
      for (std::size_t l = 0; l < dg.size(); ++l) dg[l] = g1[l] - g2[l];
      acc.x.push_back(norm(g1));
      acc.y.push_back(norm(dg) / dist);
    }
    require(acc.x.size() >= 4, "estimate_smoothness_relaxed: too few usable pairs");
    std::tie(fit.L0_hat, fit.L1_hat) = minimax_certificate(acc.x, acc.y);
    fit.max_residual = 0.0;
    for (std::size_t i = 0; i < acc.x.size(); ++i)
      fit.max_residual =
          std::max(fit.max_residual, acc.y[i] - (fit.L0_hat + fit.L1_hat * acc.x[i]));
    fit.rounds = round + 1;
    const double next = std::max(fit.L1_hat, 1e-6);
    if (std::abs(next - guess) <= 0.01 * guess) break;
    guess = next;
  }
  return fit;
}

RelaxedFit estimate_smoothness_relaxed(const problems::GradFn& grad, const Box& region,
                                       std::size_t pairs, std::uint64_t seed,
                                       double initial_L1_guess) {
  validate_box(region);
  PairSampler sampler = [region](std::mt19937_64& gen, double max_dist) {
    Vec w1 = uniform_in_box(region, gen);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec dir(w1.size());
    double n2 = 0.0;
    do {
      for (double& v : dir) v = normal(gen);
      n2 = norm_sq(dir);
    } while (n2 < 1e-12);
    std::uniform_real_distribution<double> u(0.0, max_dist);
    const double dist = u(gen);
    const double scale = dist / std::sqrt(n2);
    Vec w2(w1.size());
    for (std::size_t l = 0; l < w2.size(); ++l) w2[l] = w1[l] + scale * dir[l];
    return std::make_pair(std::move(w1), std::move(w2));
  };
  return estimate_smoothness_relaxed(grad, sampler, pairs, seed, initial_L1_guess);
}

}  // namespace adagradlab::checkers
