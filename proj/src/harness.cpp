#include "adagradlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "adagradlab/textio.hpp"
#include "adagradlab/zigzag.hpp"

namespace adagradlab::harness {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t to_u64(double v, const std::string& what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 9e15)
    throw ConfigError("config: '" + what + "' must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

double take_param(std::map<std::string, double>& params, const std::string& key, double dflt) {
  auto it = params.find(key);
  if (it == params.end()) return dflt;
  const double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, double>& params, const std::string& name) {
  if (params.empty()) return;
  std::string keys;
  for (const auto& [k, v] : params) keys += (keys.empty() ? "" : ", ") + k;
  throw ConfigError("problem '" + name + "': unknown parameter(s): " + keys);
}

}  // namespace

problems::Problem instantiate_problem(const std::string& name,
                                      const std::map<std::string, double>& params_in) {
  std::map<std::string, double> params = params_in;
  problems::Problem p;
  if (name == "two_point_quadratic") {
    const double L = take_param(params, "L", 1.0);
    const double sigma = take_param(params, "sigma", 1.0);
    const auto dim = to_u64(take_param(params, "dim", 1.0), "dim");
    const double w0 = take_param(params, "w0",
                                 3.0 / std::sqrt(static_cast<double>(std::max<std::uint64_t>(dim, 1))));
    reject_leftovers(params, name);
    p = problems::make_twopoint_quadratic(L, sigma, dim);
    p.initial_point = Vec(dim, w0);
  } else if (name == "interpolation_least_squares") {
    const auto n = to_u64(take_param(params, "n", 20.0), "n");
    const auto d = to_u64(take_param(params, "d", 50.0), "d");
    const auto seed = to_u64(take_param(params, "seed", 101.0), "seed");
    reject_leftovers(params, name);
    p = problems::make_interpolation_least_squares(n, d, seed);
  } else if (name == "truncated_gaussian_regression") {
    const auto dim = to_u64(take_param(params, "dim", 5.0), "dim");
    const auto seed = to_u64(take_param(params, "seed", 1.0), "seed");
    reject_leftovers(params, name);
    p = problems::make_truncated_gaussian_regression(dim, seed);
  } else if (name == "l0l1_cosh") {
    const double sigma = take_param(params, "sigma", 0.0);
    const double w0 = take_param(params, "w0", 2.0);
    reject_leftovers(params, name);
    p = problems::make_l0l1_cosh(sigma);
    p.initial_point = Vec{w0};
  } else if (name == "zigzag") {
    const double eta = take_param(params, "eta", 11.0);
    const double L1 = take_param(params, "L1", 1.0);
    const auto segments = to_u64(take_param(params, "segments", 64.0), "segments");
    reject_leftovers(params, name);
    p = problems::make_zigzag(eta, L1, segments);
  } else {
    throw ConfigError("unknown problem '" + name + "'");
  }
  return p;
}

ExperimentConfig config_from_document(const config::Document& doc) {
  ExperimentConfig cfg;
  auto problem_it = doc.sections.find("problem");
  if (problem_it == doc.sections.end()) throw ConfigError("config: missing [problem] section");
  for (const auto& [key, value] : problem_it->second) {
    if (key == "name") {
      cfg.problem_name = config::get_string(doc, "problem", key);
    } else if (const auto* d = std::get_if<double>(&value)) {
      cfg.problem_params[key] = *d;
    } else {
      throw ConfigError("config: [problem] key '" + key + "' must be a number");
    }
  }
  if (cfg.problem_name.empty()) throw ConfigError("config: [problem] needs name = \"...\"");

  auto exp_it = doc.sections.find("experiment");
  if (exp_it != doc.sections.end()) {
    static const std::set<std::string> known = {"method", "eta",    "horizons",     "seeds",
                                                "delta",  "nu0",    "trace_stride", "output_dir"};
    for (const auto& [key, value] : exp_it->second)
      if (!known.count(key))
        throw ConfigError("config: unknown key '" + key + "' in [experiment]");
    if (doc.has("experiment", "method"))
      cfg.method = optim::method_from_name(config::get_string(doc, "experiment", "method"));
    if (doc.has("experiment", "eta")) cfg.eta_grid = config::get_array(doc, "experiment", "eta");
    if (doc.has("experiment", "horizons"))
      for (double h : config::get_array(doc, "experiment", "horizons"))
        cfg.horizons.push_back(to_u64(h, "horizons"));
    if (doc.has("experiment", "seeds"))
      for (double s : config::get_array(doc, "experiment", "seeds"))
        cfg.seeds.push_back(to_u64(s, "seeds"));
    if (doc.has("experiment", "delta")) cfg.delta = config::get_number(doc, "experiment", "delta");
    if (doc.has("experiment", "nu0")) cfg.nu0 = config::get_number(doc, "experiment", "nu0");
    if (doc.has("experiment", "trace_stride"))
      cfg.trace_stride = to_u64(config::get_number(doc, "experiment", "trace_stride"),
                                "trace_stride");
    if (doc.has("experiment", "output_dir"))
      cfg.output_dir = config::get_string(doc, "experiment", "output_dir");
  }
  for (const auto& [section, kv] : doc.sections) {
    (void)kv;
    if (section != "problem" && section != "experiment")
      throw ConfigError("config: unknown section [" + section + "]");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_document(config::parse_file(path));
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.problem_name.empty()) throw ConfigError("config: empty problem name");
  if (cfg.eta_grid.empty()) throw ConfigError("config: eta grid must be nonempty");
  for (double e : cfg.eta_grid)
    if (!(e > 0.0)) throw ConfigError("config: every eta must be positive");
  if (cfg.seeds.empty()) throw ConfigError("config: seeds list must be nonempty");
  if (cfg.horizons.empty()) throw ConfigError("config: horizons list must be nonempty");
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    if (cfg.horizons[i] == 0) throw ConfigError("config: horizons must be positive");
    if (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1])
      throw ConfigError("config: horizons must be strictly increasing");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("config: delta must be in (0,1)");
  if (!(cfg.nu0 > 0.0)) throw ConfigError("config: nu0 must be positive");
  if (cfg.trace_stride == 0) throw ConfigError("config: trace_stride must be positive");
  if (cfg.output_dir.empty()) throw ConfigError("config: output_dir must be set");
}

namespace {

void write_trace_csv(const std::string& path, const optim::RunResult& run,
                     std::uint64_t stride, bool coordinate_columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trace file '" + path + "'");
  out << "t,f,grad_norm_sq,nu_summary,xi";
  if (coordinate_columns) out << ",xi_coord";
  out << ",step_norm\n";
  using textio::fmt17;
  const std::size_t n = run.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pt = run.points[i];
    const bool keep = ((pt.t - 1) % stride == 0) || (i + 1 == n);
    if (!keep) continue;
    out << textio::fmt_u64(pt.t) << ',' << fmt17(pt.f) << ',' << fmt17(pt.grad_norm_sq) << ','
        << fmt17(pt.nu_summary) << ',' << fmt17(pt.xi);
    if (coordinate_columns) out << ',' << fmt17(pt.xi_coord.value_or(0.0));
    out << ',' << fmt17(pt.step_norm) << '\n';
  }
}

/// A cell counts as diverged when the run tripped the magnitude guard, or
/// when both the objective and the squared gradient norm ended strictly
/// above their initial values.
bool cell_diverged(const optim::RunResult& run) {
  if (run.aborted) return true;
  if (run.points.size() < 2) return false;
  const auto& first = run.points.front();
  const auto& last = run.points.back();
  return last.f > first.f && last.grad_norm_sq > first.grad_norm_sq;
}

std::optional<diag::RateFit> fit_cell_rate(const std::vector<std::uint64_t>& checkpoints,
                                           const std::vector<double>& running_min,
                                           std::uint64_t burn_in_below) {
  std::vector<diag::RatePoint> pts;
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i] >= burn_in_below && running_min[i] > 0.0)
      pts.push_back({checkpoints[i], running_min[i]});
  if (pts.size() < 3) {
    pts.clear();
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
      if (running_min[i] > 0.0) pts.push_back({checkpoints[i], running_min[i]});
  }
  if (pts.size() < 3) return std::nullopt;
  return diag::fit_rate(pts);
}

ordered_json rate_fit_json(const std::optional<diag::RateFit>& fit) {
  if (!fit) return nullptr;
  return ordered_json{{"slope", fit->slope},
                      {"intercept", fit->intercept},
                      {"r_squared", fit->r_squared}};
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, par::Policy policy) {
  validate(cfg);
  const problems::Problem problem = instantiate_problem(cfg.problem_name, cfg.problem_params);
  fs::create_directories(cfg.output_dir);

  const std::uint64_t final_horizon = cfg.horizons.back();
  // Running minima stay exact for any trace_stride: they are computed from
  // the full in-memory trace, the stride only thins the CSV.
  const std::uint64_t burn_in_below = cfg.horizons.front() * 10;

  ExperimentSummary summary;
  const std::size_t n_cells = cfg.eta_grid.size() * cfg.seeds.size();
  summary.cells.resize(n_cells);

  par::for_each_index(
      n_cells,
      [&](std::size_t idx) {
        const std::size_t ei = idx / cfg.seeds.size();
        const std::size_t si = idx % cfg.seeds.size();
        CellResult& cell = summary.cells[idx];
        cell.eta = cfg.eta_grid[ei];
        cell.seed = cfg.seeds[si];

        optim::OptimizerConfig oc{cell.eta, cfg.nu0};
        const optim::RunResult run =
            optim::run(problem, cfg.method, oc, final_horizon, cell.seed);

        cell.diverged = cell_diverged(run);
        cell.abort_reason = run.abort_reason;
        for (std::uint64_t T : cfg.horizons)
          cell.running_min_grad_sq.push_back(run.running_min_grad_sq(T));
        if (!run.points.empty()) {
          cell.final_f = run.points.back().f;
          cell.final_grad_norm_sq = run.points.back().grad_norm_sq;
        }
        if (!cell.diverged)
          cell.rate_fit = fit_cell_rate(cfg.horizons, cell.running_min_grad_sq, burn_in_below);

        cell.trace_file = "trace_eta" + std::to_string(ei) + "_seed" +
                          std::to_string(cell.seed) + ".csv";
        write_trace_csv((fs::path(cfg.output_dir) / cell.trace_file).string(), run,
                        cfg.trace_stride, cfg.method != optim::Method::norm);
      },
      policy);

  const auto& k = problem.constants;
  const bool bound_available = k.L && k.D0 && k.D1 && *k.L > 0.0 && *k.D1 > 0.0;
  const double f_w1 = problem.value(problem.initial_point);
  const double grad0_sq = norm_sq(problem.full_gradient(problem.initial_point));

  for (std::size_t ei = 0; ei < cfg.eta_grid.size(); ++ei) {
    EtaAggregate agg;
    agg.eta = cfg.eta_grid[ei];
    if (bound_available) {
      agg.bound = diag::compute_bound_constants(f_w1, k.f_star, agg.eta, *k.L, *k.D0, *k.D1,
                                                cfg.nu0, grad0_sq);
      agg.bound_rhs_at_final = diag::high_prob_bound_rhs(*agg.bound, final_horizon, cfg.delta, *k.D0);
      std::size_t violations = 0;
      for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
        const CellResult& cell = summary.cells[ei * cfg.seeds.size() + si];
        if (cell.running_min_grad_sq.back() > *agg.bound_rhs_at_final) ++violations;
      }
      agg.violation_fraction =
          static_cast<double>(violations) / static_cast<double>(cfg.seeds.size());
    }
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
      const CellResult& cell = summary.cells[ei * cfg.seeds.size() + si];
      if (cell.rate_fit) agg.slopes.push_back(cell.rate_fit->slope);
    }
    summary.per_eta.push_back(std::move(agg));
  }

  ordered_json j;
  j["problem"] = ordered_json{{"name", cfg.problem_name}};
  for (const auto& [key, v] : cfg.problem_params) j["problem"][key] = v;
  j["method"] = optim::method_name(cfg.method);
  j["delta"] = cfg.delta;
  j["nu0"] = cfg.nu0;
  j["trace_stride"] = cfg.trace_stride;
  j["checkpoints"] = cfg.horizons;
  j["cells"] = ordered_json::array();
  for (const CellResult& cell : summary.cells) {
    ordered_json c;
    c["eta"] = cell.eta;
    c["seed"] = cell.seed;
    c["trace_file"] = cell.trace_file;
    c["diverged"] = cell.diverged;
    c["abort_reason"] = cell.abort_reason;
    c["running_min_grad_sq"] = cell.running_min_grad_sq;
    c["final_f"] = cell.final_f;
    c["final_grad_norm_sq"] = cell.final_grad_norm_sq;
    c["rate_fit"] = rate_fit_json(cell.rate_fit);
    j["cells"].push_back(std::move(c));
  }
  j["per_eta"] = ordered_json::array();
  for (const EtaAggregate& agg : summary.per_eta) {
    ordered_json a;
    a["eta"] = agg.eta;
    if (agg.bound) {
      a["bound_constants"] =
          ordered_json{{"C1", agg.bound->C1}, {"C2", agg.bound->C2}, {"C3", agg.bound->C3}};
      a["bound_rhs_at_final"] = *agg.bound_rhs_at_final;
      a["violation_fraction"] = *agg.violation_fraction;
    } else {
      a["bound_constants"] = nullptr;
      a["bound_rhs_at_final"] = nullptr;
      a["violation_fraction"] = nullptr;
    }
    a["slopes"] = agg.slopes;
    j["per_eta"].push_back(std::move(a));
  }

  summary.summary_file = (fs::path(cfg.output_dir) / "summary.json").string();
  std::ofstream out(summary.summary_file, std::ios::binary);
  if (!out) throw ConfigError("cannot write summary file '" + summary.summary_file + "'");
  out << j.dump(2) << '\n';
  return summary;
}

bool CheckReport::all_pass() const {
  for (const auto& line : lines)
    if (!line.informational && !line.pass) return false;
  return true;
}

}  // namespace adagradlab::harness
