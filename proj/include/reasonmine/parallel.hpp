#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace reasonmine {

/// Applies fn(i) for i in [0, n) on up to `workers` threads and returns the
/// results in index order, regardless of completion order. The first exception
/// thrown by any call is rethrown after all workers have joined.
template <class F>
auto ordered_parallel_map(std::size_t n, std::size_t workers, F &&fn)
    -> std::vector<std::invoke_result_t<F &, std::size_t>> {
  using R = std::invoke_result_t<F &, std::size_t>;
  std::vector<R> results(n);
  if (n == 0) return results;
  workers = std::clamp<std::size_t>(workers, 1, n);

  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();  // joins

  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace reasonmine
