#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace hdqkd {

// Runs fn(i) for i in [0, count) across up to `threads` workers in fixed
// contiguous chunks. Callers must make fn(i) independent of execution order;
// results are then identical for any thread count.
inline void parallel_for(std::int64_t count, int threads,
                         const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  if (threads < 1) threads = 1;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(threads, count));
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = count * w / workers;
    const std::int64_t hi = count * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hdqkd
