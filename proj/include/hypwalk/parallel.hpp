#pragma once

#include <cstddef>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hypwalk {

enum class ExecutionMode { serial, parallel };

// Calls fn(i) for i in [0, n). In parallel mode the iterations are spread over
// OpenMP threads (threads <= 0 keeps the runtime default); fn must only write
// to per-index slots. The exception of the lowest failing index is rethrown,
// so both modes report the same error.
template <class F>
void for_each_replica(std::size_t n, ExecutionMode mode, F&& fn, int threads = 0) {
  if (mode == ExecutionMode::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::size_t err_index = std::numeric_limits<std::size_t>::max();
  const long count = static_cast<long>(n);
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(hypwalk_replica_error)
#endif
      {
        if (static_cast<std::size_t>(i) < err_index) {
          err_index = static_cast<std::size_t>(i);
          err = std::current_exception();
        }
      }
    }
  }
  (void)threads;
  if (err) std::rethrow_exception(err);
}

}  // namespace hypwalk
