#pragma once

// Index-parallel loop with a serial reference path.

#include <cstddef>
#include <exception>
#include <mutex>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace qbm {

enum class Execution { serial, parallel };

/// Number of worker threads used when `requested` is 0.
inline int default_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Calls fn(i) for i in [0, n). Each index must write only its own slot;
/// the first exception thrown by any index is rethrown after the loop.
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, int threads, Fn&& fn) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#if defined(_OPENMP)
  const int nt = threads > 0 ? threads : default_threads();
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
#else
  (void)threads;
  for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace qbm
