#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace expkin {

/// Worker count from EXPKIN_THREADS; 1 when unset or invalid.
inline unsigned worker_count() {
  static const unsigned count = [] {
    const char* env = std::getenv("EXPKIN_THREADS");
    if (env == nullptr) return 1u;
    try {
      const long n = std::stol(env);
      return n > 0 ? static_cast<unsigned>(n) : 1u;
    } catch (...) {
      return 1u;
    }
  }();
  return count;
}

/// Runs body(i) for i in [0, n), split into contiguous blocks across workers.
/// The first exception thrown by any block is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace expkin
