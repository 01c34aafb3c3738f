#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stoheat {

// Runs fn(0..count-1) on up to `threads` workers and returns results indexed
// by job. Scheduling order never affects the output vector, so reductions
// over it are deterministic across worker counts.
template <typename R>
std::vector<R> parallel_map_indexed(int count, int threads, const std::function<R(int)>& fn) {
  std::vector<R> results(static_cast<std::size_t>(count));
  if (count == 0) return results;

  int workers = threads;
  if (workers < 1) workers = 1;
  if (workers > count) workers = count;

  if (workers == 1) {
    for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = fn(i);
    return results;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        results[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace stoheat
