// Compares the serial reference against the OpenMP path on the two
// data-parallel kernels: Monte-Carlo second-moment estimation and the
// experiment grid. Both paths produce bitwise-identical numbers (asserted
// here); the table reports wall time and speedup.

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "adagradlab/assumption_checkers.hpp"
#include "adagradlab/harness.hpp"
#include "adagradlab/parallel.hpp"
#include "adagradlab/problems.hpp"

using namespace adagradlab;
using Clock = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_of(Fn&& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void row(const char* name, double serial, double openmp, bool identical) {
  std::printf("%-34s %9.3fs %9.3fs %7.2fx   %s\n", name, serial, openmp,
              serial / openmp, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("%-34s %10s %10s %8s   %s\n", "kernel", "serial", "openmp", "speedup",
              "results");
  std::printf("threads: %d\n", par::max_threads());

  {
    const auto tg = problems::make_truncated_gaussian_regression(8, 1);
    const Vec w{0.5, -1.0, 2.0, 0.25, 1.5, -0.75, 0.1, 3.0};
    checkers::McEstimate a, b;
    const double ts = time_of([&] {
      a = checkers::mc_second_moment(tg, w, 4000000, 7, 0, std::nullopt, par::Policy::serial);
    });
    const double tp = time_of([&] {
      b = checkers::mc_second_moment(tg, w, 4000000, 7, 0, std::nullopt, par::Policy::openmp);
    });
    row("mc_second_moment (4e6 samples)", ts, tp,
        a.mean == b.mean && a.std_error == b.std_error);
  }

  {
    harness::ExperimentConfig cfg;
    cfg.problem_name = "two_point_quadratic";
    cfg.problem_params = {{"L", 1.0}, {"sigma", 1.0}, {"dim", 25.0}, {"w0", 0.2}};
    cfg.eta_grid = {0.1, 0.5, 1.0, 2.0};
    cfg.horizons = {1000, 10000, 100000};
    cfg.seeds = {1, 2, 3, 4};
    cfg.trace_stride = 1000;
    cfg.output_dir = "/tmp/adagradlab_bench_serial";
    std::filesystem::remove_all(cfg.output_dir);
    harness::ExperimentSummary a, b;
    const double ts = time_of([&] { a = harness::run_experiment(cfg, par::Policy::serial); });
    cfg.output_dir = "/tmp/adagradlab_bench_openmp";
    std::filesystem::remove_all(cfg.output_dir);
    const double tp = time_of([&] { b = harness::run_experiment(cfg, par::Policy::openmp); });
    bool identical = a.cells.size() == b.cells.size();
    for (std::size_t i = 0; identical && i < a.cells.size(); ++i)
      identical = a.cells[i].running_min_grad_sq == b.cells[i].running_min_grad_sq &&
                  a.cells[i].final_f == b.cells[i].final_f;
    row("experiment grid (16 cells x 1e5)", ts, tp, identical);
  }

  return 0;
}
