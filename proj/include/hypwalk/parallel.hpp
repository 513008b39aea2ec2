#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

#include <hypwalk/error.hpp>

namespace hypwalk {

// Machine parallelism, used as the default worker count by the CLI.
inline int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

namespace detail {

// Runs fn(i) for every i in [0, count) split across workers in contiguous
// chunks.  Every index owns its own output slot and its own random stream,
// so the result does not depend on the worker count.  fn must not throw.
inline void parallel_for(long count, int workers,
                         const std::function<void(long)>& fn) {
  require(workers >= 1, ErrorCode::invalid_argument,
          "parallel_for: worker count must be at least 1");
  if (workers == 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  long chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    long lo = w * chunk;
    long hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail
}  // namespace hypwalk
