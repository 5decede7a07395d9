#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace oranlb {

/// Runs fn(i) for i in [0, n) across `threads` workers in contiguous chunks.
/// Caller guarantees fn writes only to slot i, so the result is identical
/// for any thread count.
template <typename Fn>
void parallel_for(std::uint64_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::uint64_t t = static_cast<std::uint64_t>(threads);
  const std::uint64_t chunk = (n + t - 1) / t;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<size_t>(t));
  for (std::uint64_t w = 0; w < t; ++w) {
    const std::uint64_t lo = w * chunk;
    if (lo >= n) break;
    const std::uint64_t hi = std::min(n, lo + chunk);
    workers.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace oranlb
