#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stablab {

// Runs body(i) for i in [0, count).  Each index writes to its own result
// slot and draws from its own RNG stream, so the outcome is identical for
// every jobs value; only wall time changes.  The first exception thrown by
// any index is rethrown on the calling thread once all workers have joined.
template <class F>
void parallel_for(long count, int jobs, F&& body) {
  if (count <= 0) return;
  jobs = static_cast<int>(std::max<long>(1, std::min<long>(jobs, count)));
  if (jobs == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      for (long i = t; i < count; i += jobs) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace stablab
