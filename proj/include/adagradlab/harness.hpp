#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adagradlab/config.hpp"
#include "adagradlab/diagnostics.hpp"
#include "adagradlab/optimizers.hpp"
#include "adagradlab/parallel.hpp"
#include "adagradlab/problems.hpp"

namespace adagradlab::harness {

struct ExperimentConfig {
  std::string problem_name;
  std::map<std::string, double> problem_params;
  optim::Method method = optim::Method::norm;
  std::vector<double> eta_grid;
  std::vector<std::uint64_t> horizons;  // strictly increasing checkpoints
  std::vector<std::uint64_t> seeds;
  double delta = 0.5;
  double nu0 = 1.0;
  std::uint64_t trace_stride = 1;
  std::string output_dir = "out";
};

/// Maps a parsed document onto ExperimentConfig; unknown keys are errors.
ExperimentConfig config_from_document(const config::Document& doc);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& cfg);

/// Builds a bundled problem by name; rejects unknown names and unknown
/// parameter keys.
problems::Problem instantiate_problem(const std::string& name,
                                      const std::map<std::string, double>& params);

struct CellResult {
  double eta = 0.0;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string abort_reason;
  std::vector<double> running_min_grad_sq;  // one entry per checkpoint
  double final_f = 0.0;
  double final_grad_norm_sq = 0.0;
  std::optional<diag::RateFit> rate_fit;
  std::string trace_file;
};

struct EtaAggregate {
  double eta = 0.0;
  std::optional<diag::BoundConstants> bound;
  std::optional<double> bound_rhs_at_final;    // high-probability bound at the last checkpoint
  std::optional<double> violation_fraction;    // seeds with min grad^2 above the bound
  std::vector<double> slopes;                  // fitted rate exponents across seeds
};

struct ExperimentSummary {
  std::vector<CellResult> cells;
  std::vector<EtaAggregate> per_eta;
  std::string summary_file;
};

/// Runs the (eta, seed) grid. Cells execute independently (optionally in
/// parallel); each writes its own trace CSV, and the summary JSON is
/// assembled in fixed cell order, so outputs are byte-stable across runs
/// and thread counts.
ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 par::Policy policy = par::Policy::openmp);

struct CheckLine {
  std::string name;
  bool pass = false;
  bool informational = false;  // reported but not counted toward the verdict
  std::string detail;
};

struct CheckReport {
  std::string suite;
  std::vector<CheckLine> lines;
  bool all_pass() const;
};

/// Named property suites: lemma1, lemma2, descent, assumptions, trajectory.
CheckReport run_checks(const std::string& suite);
std::vector<std::string> check_suite_names();

}  // namespace adagradlab::harness
