#include "adagradlab/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adagradlab/rng.hpp"

namespace adagradlab::optim {

namespace {

constexpr double kMagnitudeGuard = 1e300;

void require_step_inputs(std::size_t state_dim, std::span<const double> g, double eta) {
  require_same_dim(g.size(), state_dim, "gradient vs state");
  if (!all_finite(g)) throw std::invalid_argument("non-finite entries in gradient");
  require(eta >= 0.0 && std::isfinite(eta), "eta must be finite and nonnegative");
}

}  // namespace

NormState adagrad_norm_step(const NormState& state, std::span<const double> g, double eta) {
  require_step_inputs(state.w.size(), g, eta);
  require(state.nu > 0.0, "nu must be positive");
  NormState next;
  next.nu = state.nu + norm_sq(g);
  next.w.resize(state.w.size());
  const double sqrt_nu = std::sqrt(next.nu);
  for (std::size_t l = 0; l < g.size(); ++l)
    next.w[l] = state.w[l] - eta * g[l] / sqrt_nu;
  next.t = state.t + 1;
  return next;
}

CoordState adagrad_step(const CoordState& state, std::span<const double> g, double eta) {
  require_step_inputs(state.w.size(), g, eta);
  require_same_dim(state.nu.size(), state.w.size(), "nu vs state");
  CoordState next;
  next.w.resize(state.w.size());
  next.nu.resize(state.nu.size());
  for (std::size_t l = 0; l < g.size(); ++l) {
    require(state.nu[l] > 0.0, "nu must be elementwise positive");
    next.nu[l] = state.nu[l] + g[l] * g[l];
    next.w[l] = state.w[l] - eta * g[l] / std::sqrt(next.nu[l]);
  }
  next.t = state.t + 1;
  return next;
}

void validate_plan(const EpochPlan& plan) {
  if (plan.permutation.size() != plan.n)
    throw std::invalid_argument("epoch plan: permutation length != n");
  std::vector<bool> seen(plan.n, false);
  for (std::size_t idx : plan.permutation) {
    if (idx >= plan.n || seen[idx])
      throw std::invalid_argument("epoch plan: not a permutation of 0..n-1");
    seen[idx] = true;
  }
}

EpochPlan sample_plan(std::size_t n, std::mt19937_64& gen) {
  EpochPlan plan;
  plan.n = n;
  plan.permutation.resize(n);
  for (std::size_t i = 0; i < n; ++i) plan.permutation[i] = i;
  // Fisher-Yates with a plain modulo draw: deterministic across platforms,
  // bias is O(n / 2^64).
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(plan.permutation[i - 1], plan.permutation[j]);
  }
  return plan;
}

EpochResult rr_adagrad_epoch(const CoordState& state,
                             std::span<const problems::GradFn> components,
                             const EpochPlan& plan, double eta) {
  if (plan.n != components.size())
    throw std::invalid_argument("epoch plan: n does not match component count");
  validate_plan(plan);
  EpochResult res;
  res.state = state;
  res.inner.reserve(plan.n);
  for (std::size_t i = 0; i < plan.n; ++i) {
    const std::size_t comp = plan.permutation[i];
    Vec g = components[comp](res.state.w);
    InnerRecord rec;
    rec.epoch = state.t;
    rec.i = i;
    rec.component = comp;
    rec.w = res.state.w;
    rec.g = g;
    CoordState stepped = adagrad_step(res.state, g, eta);
    stepped.t = res.state.t;  // inner steps do not advance the epoch counter
    rec.nu = stepped.nu;
    res.inner.push_back(std::move(rec));
    res.state = std::move(stepped);
  }
  res.state.t = state.t + 1;
  return res;
}

Method method_from_name(const std::string& name) {
  if (name == "norm") return Method::norm;
  if (name == "coordinate") return Method::coordinate;
  if (name == "rr") return Method::rr;
  throw ConfigError("unknown method '" + name + "' (expected norm|coordinate|rr)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::norm: return "norm";
    case Method::coordinate: return "coordinate";
    case Method::rr: return "rr";
  }
  return "?";
}

double RunResult::running_min_grad_sq(std::size_t upto) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = std::min(upto, points.size());
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, points[i].grad_norm_sq);
  return best;
}

namespace {

double xi_of(double grad_sq, double nu) { return grad_sq / std::sqrt(nu); }

double coordinate_xi(std::span<const double> grad, std::span<const double> nu) {
  double s = 0.0;
  for (std::size_t l = 0; l < grad.size(); ++l) s += grad[l] * grad[l] / std::sqrt(nu[l]);
  return s;
}

bool magnitude_ok(double f, std::span<const double> w) {
  return std::isfinite(f) && std::abs(f) <= kMagnitudeGuard && all_finite(w) &&
         norm(w) <= kMagnitudeGuard;
}

}  // namespace

RunResult run(const problems::Problem& problem, Method method, const OptimizerConfig& config,
              std::uint64_t horizon, std::uint64_t seed) {
  require(config.eta > 0.0 && std::isfinite(config.eta), "config: eta must be positive");
  require(config.nu0 > 0.0 && std::isfinite(config.nu0), "config: nu0 must be positive");
  if (method == Method::rr && problem.components.empty())
    throw ConfigError("run: method 'rr' needs finite-sum components, which problem '" +
                      problem.name + "' does not provide");
  if (!problem.oracle) throw ConfigError("run: problem provides no stochastic oracle");

  RunResult res;
  res.points.reserve(horizon);
  auto gen = rng::stream(seed, /*lane=*/0x2a);

  const double step_cap =
      method == Method::norm
          ? config.eta
          : config.eta * std::sqrt(static_cast<double>(problem.dim));

  NormState ns{problem.initial_point, config.nu0, 0};
  CoordState cs{problem.initial_point, Vec(problem.dim, config.nu0), 0};

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    TracePoint pt;
    pt.t = t;
    const Vec& w = (method == Method::norm) ? ns.w : cs.w;
    Vec grad;
    try {
      pt.f = problem.value(w);
      grad = problem.full_gradient(w);
    } catch (const std::domain_error& e) {
      res.aborted = true;
      res.abort_reason = std::string("objective undefined at iterate: ") + e.what();
      break;
    }
    pt.grad_norm_sq = norm_sq(grad);
    if (!magnitude_ok(pt.f, w) || !std::isfinite(pt.grad_norm_sq)) {
      res.aborted = true;
      res.abort_reason = "non-finite or oversized iterate/objective/gradient";
      res.points.push_back(pt);
      break;
    }

    bool ok = true;
    if (method == Method::norm) {
      Vec g = problem.oracle(w, gen);
      ok = all_finite(g);
      if (ok) {
        NormState next = adagrad_norm_step(ns, g, config.eta);
        pt.nu_summary = next.nu;
        double step = 0.0;
        for (std::size_t l = 0; l < g.size(); ++l) {
          const double d = next.w[l] - ns.w[l];
          step += d * d;
        }
        pt.step_norm = std::sqrt(step);
        ns = std::move(next);
      }
    } else if (method == Method::coordinate) {
      Vec g = problem.oracle(w, gen);
      ok = all_finite(g);
      if (ok) {
        CoordState next = adagrad_step(cs, g, config.eta);
        double nu_sum = 0.0, step = 0.0;
        for (std::size_t l = 0; l < g.size(); ++l) {
          nu_sum += next.nu[l];
          const double d = next.w[l] - cs.w[l];
          step += d * d;
        }
        pt.nu_summary = nu_sum;
        pt.step_norm = std::sqrt(step);
        pt.xi_coord = coordinate_xi(grad, next.nu);
        cs = std::move(next);
      }
    } else {
      EpochPlan plan = sample_plan(problem.components.size(), gen);
      EpochResult er;
      try {
        er = rr_adagrad_epoch(cs, problem.components, plan, config.eta);
      } catch (const std::domain_error& e) {
        res.aborted = true;
        res.abort_reason = std::string("objective undefined inside epoch: ") + e.what();
        res.points.push_back(pt);
        break;
      }
      double nu_sum = 0.0, step = 0.0;
      for (std::size_t l = 0; l < problem.dim; ++l) {
        nu_sum += er.state.nu[l];
        const double d = er.state.w[l] - cs.w[l];
        step += d * d;
      }
      ok = all_finite(er.state.w) && all_finite(er.state.nu);
      pt.nu_summary = nu_sum;
      pt.step_norm = std::sqrt(step);
      pt.xi_coord = coordinate_xi(grad, er.state.nu);
      for (auto& rec : er.inner) res.inner.push_back(std::move(rec));
      cs = std::move(er.state);
    }

    if (!ok) {
      res.aborted = true;
      res.abort_reason = "non-finite stochastic gradient";
      res.points.push_back(pt);
      break;
    }
    pt.xi = xi_of(pt.grad_norm_sq, pt.nu_summary);

    // Step-size cap: eta for the scalar variant, eta*sqrt(d) per-coordinate.
    // For rr the cap applies per inner step, so an epoch moves at most n times
    // as far.
    const double cap =
        (method == Method::rr ? static_cast<double>(problem.components.size()) : 1.0) * step_cap;
    if (std::isfinite(pt.step_norm) && pt.step_norm > cap * (1.0 + 1e-9))
      throw std::logic_error("step-size cap violated");

    res.points.push_back(pt);
  }
  return res;
}

}  // namespace adagradlab::optim
