#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace frog {

/// How replication loops run. Results never depend on this: every iteration
/// owns its random stream and writes only its own output slot.
struct ExecPolicy {
  bool parallel = true;
  int jobs = 0;  // 0 = OpenMP default thread count

  static ExecPolicy serial() { return ExecPolicy{false, 1}; }
};

/// Runs body(i) for i in [0, count). The first exception thrown by any
/// iteration is rethrown after the loop.
template <class Body>
void for_each_index(std::int64_t count, const ExecPolicy& exec, Body&& body) {
  if (!exec.parallel || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
#ifdef _OPENMP
  const int threads = exec.jobs > 0 ? exec.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace frog
