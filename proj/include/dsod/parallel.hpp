// Deterministic fan-out: trial i writes only slot i, so results are invariant
// under the worker count; reductions happen afterwards in index order.
#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dsod {

inline void parallel_for(long count, int workers,
                         const std::function<void(long)>& fn) {
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : static_cast<int>(hw);
  }
  if (workers == 1 || count < 2) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  if (workers > count) workers = static_cast<int>(count);

  std::vector<std::thread> pool;
  std::exception_ptr first_error = nullptr;
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  for (int w = 0; w < workers; ++w) {
    const long lo = count * w / workers;
    const long hi = count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (long i = lo; i < hi && !failed.load(std::memory_order_relaxed); ++i)
          fn(i);
      } catch (...) {
        failed.store(true);
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dsod
