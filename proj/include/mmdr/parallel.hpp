#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "mmdr/common.hpp"

namespace mmdr {

/// Runs fn(0..n-1) across `workers` threads, items handed out by an atomic
/// counter.  Callers must make fn(i) write only to slot i of preallocated
/// storage; then results are identical at any worker count.  The first
/// exception is rethrown on the calling thread once every worker has joined.
inline void parallel_for(std::int64_t n, int workers,
                         const std::function<void(std::int64_t)>& fn) {
  if (workers < 1)
    throw InvalidParameterError(strfmt("workers must be positive, got %d", workers));
  if (n <= 0) return;
  if (workers > n) workers = static_cast<int>(n);

  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mmdr
