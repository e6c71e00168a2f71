#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <nlohmann/json.hpp>

#include "adagradlab/diagnostics.hpp"
#include "adagradlab/harness.hpp"
#include "adagradlab/textio.hpp"

namespace {

using adagradlab::ConfigError;
namespace harness = adagradlab::harness;
namespace diag = adagradlab::diag;
using ordered_json = nlohmann::ordered_json;

int emit_error(const std::string& kind, const std::string& message) {
  ordered_json err;
  err["error"] = message;
  err["kind"] = kind;
  std::cout << err.dump(2) << std::endl;
  return 2;
}

int cmd_run(const std::string& config_path, bool serial) {
  const auto cfg = harness::load_config(config_path);
  const auto summary = harness::run_experiment(
      cfg, serial ? adagradlab::par::Policy::serial : adagradlab::par::Policy::openmp);
  ordered_json out;
  out["summary_file"] = summary.summary_file;
  out["cells"] = summary.cells.size();
  std::size_t diverged = 0;
  for (const auto& cell : summary.cells) diverged += cell.diverged ? 1 : 0;
  out["diverged_cells"] = diverged;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int cmd_check(const std::string& suite) {
  const auto report = harness::run_checks(suite);
  std::size_t failed = 0;
  for (const auto& line : report.lines) {
    const char* tag = line.pass ? "PASS" : (line.informational ? "info" : "FAIL");
    if (!line.pass && line.informational) tag = "info(FAIL)";
    std::printf("[%s] %s: %s%s%s\n", tag, report.suite.c_str(), line.name.c_str(),
                line.detail.empty() ? "" : " -- ", line.detail.c_str());
    if (!line.pass && !line.informational) ++failed;
  }
  std::printf("%s: %zu/%zu checks passed\n", report.suite.c_str(),
              report.lines.size() - failed, report.lines.size());
  return report.all_pass() ? 0 : 1;
}

int cmd_constants(const std::string& config_path) {
  const auto cfg = harness::load_config(config_path);
  const auto problem = harness::instantiate_problem(cfg.problem_name, cfg.problem_params);
  const auto& k = problem.constants;

  ordered_json out;
  out["problem"] = cfg.problem_name;
  ordered_json ckj;
  if (k.L) ckj["L"] = *k.L;
  if (k.D0) ckj["D0"] = *k.D0;
  if (k.D1) ckj["D1"] = *k.D1;
  if (k.L0) ckj["L0"] = *k.L0;
  if (k.L1) ckj["L1"] = *k.L1;
  ckj["f_star"] = k.f_star;
  ckj["coordinate_affine_holds"] = k.coordinate_affine_holds;
  out["certified_constants"] = ckj;

  const std::vector<double> etas = cfg.eta_grid.empty() ? std::vector<double>{1.0} : cfg.eta_grid;
  const std::uint64_t T = cfg.horizons.empty() ? 10000 : cfg.horizons.back();
  out["per_eta"] = ordered_json::array();
  const double f_w1 = problem.value(problem.initial_point);
  const double grad0_sq = adagradlab::norm_sq(problem.full_gradient(problem.initial_point));
  for (double eta : etas) {
    ordered_json e;
    e["eta"] = eta;
    if (k.L && k.D0 && k.D1 && *k.L > 0.0 && *k.D1 > 0.0) {
      const auto c = diag::compute_bound_constants(f_w1, k.f_star, eta, *k.L, *k.D0, *k.D1,
                                                   cfg.nu0, grad0_sq);
      e["C1"] = c.C1;
      e["C2"] = c.C2;
      e["C3"] = c.C3;
      e["bound_rhs"] = ordered_json{{"T", T},
                                    {"delta", cfg.delta},
                                    {"value", diag::high_prob_bound_rhs(c, T, cfg.delta, *k.D0)}};
    } else {
      e["C1"] = nullptr;
      e["C2"] = nullptr;
      e["C3"] = nullptr;
      e["bound_rhs"] = nullptr;
    }
    out["per_eta"].push_back(std::move(e));
  }
  if (k.L1 && k.D1 && *k.L1 > 0.0 && *k.D1 > 0.0)
    out["relaxed_eta_threshold"] = diag::relaxed_eta_threshold(*k.L1, *k.D1);
  else
    out["relaxed_eta_threshold"] = nullptr;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AdaGrad convergence laboratory"};
  app.require_subcommand(1);

  std::string run_config, constants_config, suite;
  bool serial = false;

  auto* run = app.add_subcommand("run", "Run an experiment grid from a config file");
  run->add_option("--config", run_config, "config file path")->required();
  run->add_flag("--serial", serial, "run grid cells serially");

  auto* check = app.add_subcommand("check", "Run a named property suite");
  check->add_option("--suite", suite, "lemma1|lemma2|descent|assumptions|trajectory")
      ->required();

  auto* constants = app.add_subcommand("constants", "Print bound constants for a problem");
  constants->add_option("--config", constants_config, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, serial);
    if (check->parsed()) return cmd_check(suite);
    if (constants->parsed()) return cmd_constants(constants_config);
  } catch (const ConfigError& e) {
    return emit_error("config", e.what());
  } catch (const std::invalid_argument& e) {
    return emit_error("argument", e.what());
  } catch (const std::exception& e) {
    return emit_error("internal", e.what());
  }
  return 0;
}
