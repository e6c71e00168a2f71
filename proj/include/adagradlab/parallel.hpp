#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adagradlab::par {

enum class Policy { serial, openmp };

/// Thread cap: ADAGRAD_LAB_THREADS if set (clamped to >= 1), else hardware count.
inline int max_threads() {
  if (const char* env = std::getenv("ADAGRAD_LAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, n). The OpenMP path schedules iterations across
/// threads; results must be written to disjoint slots so both policies
/// produce identical state.
template <typename Fn>
void for_each_index(std::size_t n, Fn&& fn, Policy policy) {
#ifdef _OPENMP
  if (policy == Policy::openmp) {
    const int nt = max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      fn(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)policy;
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

/// Deterministic blocked sum: items are split into fixed-size blocks, each
/// block is summed serially into its own slot, and the slots are reduced in
/// block order. The floating-point result is bitwise identical for the
/// serial and OpenMP policies and for any thread count.
///
/// `term(i)` must depend only on i (give each block/item its own derived
/// random stream when sampling).
template <typename TermFn>
double blocked_sum(std::size_t n_items, TermFn&& term, Policy policy,
                   std::size_t block = 4096) {
  if (n_items == 0) return 0.0;
  const std::size_t n_blocks = (n_items + block - 1) / block;
  std::vector<double> partial(n_blocks, 0.0);
  for_each_index(
      n_blocks,
      [&](std::size_t b) {
        const std::size_t lo = b * block;
        const std::size_t hi = std::min(n_items, lo + block);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[b] = s;
      },
      policy);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace adagradlab::par
