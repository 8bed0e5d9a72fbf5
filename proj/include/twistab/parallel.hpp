#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace twistab {

/// Process-wide worker count used by `parallel_for`. Defaults to 1.
void set_thread_count(int n);
int thread_count();

/// Calls `fn(i)` for every i in [0, n), split into contiguous chunks over the
/// configured worker count. Callers write results into per-index slots, so
/// output never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Pairwise summation; the result depends only on the order of `v`.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace twistab
