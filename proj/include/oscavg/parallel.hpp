#pragma once

#include <cstddef>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oscavg {

/// Execution policy for the data-parallel kernels.
///
/// Every parallel kernel in this library is a loop whose iteration i writes
/// only to slot i of preallocated output storage, followed by a serial
/// combine.  The serial and parallel paths therefore produce bitwise
/// identical results; tests assert this.
enum class Exec { serial, parallel };

/// Number of threads the parallel path would use.
int max_threads();

/// Caps the thread count for subsequent parallel regions.  n <= 0 leaves
/// the current setting untouched.
void set_threads(int n);

/// Runs body(i) for i in [0, n).  With Exec::parallel the iterations run
/// under OpenMP when it is available; body must only write to per-index
/// slots.  The first exception thrown by any iteration is rethrown on the
/// calling thread.
template <typename F>
void for_each_index(Exec exec, std::ptrdiff_t n, F&& body) {
  if (n <= 0) return;
#ifdef _OPENMP
  if (exec == Exec::parallel) {
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(oscavg_for_each_index_error)
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
    return;
  }
#else
  (void)exec;
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

}  // namespace oscavg
