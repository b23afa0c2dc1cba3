#pragma once

// Deterministic parallel helpers. Work is split into static contiguous chunks and
// every result is written to its own slot, so the reduction order never depends
// on scheduling or on the thread count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace cfslab {

struct ParallelOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls f(i) for i in [0, count). Exceptions from workers are rethrown on the
/// calling thread (the one with the lowest index wins).
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  unsigned nt = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(nt);
  {
    std::vector<std::jthread> pool;
    pool.reserve(nt);
    std::size_t chunk = (count + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(count, lo + chunk);
      pool.emplace_back([&, t, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) f(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Fixed-topology pairwise summation: the tree shape depends only on the length.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace cfslab
