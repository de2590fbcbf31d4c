#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ffvc {

namespace detail {
inline int default_thread_count() {
  if (const char* env = std::getenv("FFVC_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline std::atomic<int>& thread_count_slot() {
  static std::atomic<int> slot{default_thread_count()};
  return slot;
}
}  // namespace detail

/// Worker count used by every parallel loop. Defaults to $FFVC_THREADS or
/// the hardware concurrency.
inline int thread_count() { return detail::thread_count_slot().load(std::memory_order_relaxed); }

inline void set_thread_count(int n) { detail::thread_count_slot().store(std::max(1, n), std::memory_order_relaxed); }

/// Runs f(i) for i in [0, n) with dynamic scheduling. Callers write results
/// into per-index slots, so output never depends on the schedule.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ffvc
