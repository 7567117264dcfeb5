#pragma once

#include <cstddef>
#include <exception>

namespace cidlab {

/// Kernels that have an OpenMP version also keep a serial reference path.
/// Both produce identical results; only the schedule differs.
enum class Execution { serial, parallel };

/// Calls body(i) for i in [0, count). Each index must write only its own
/// output slot. The first exception thrown by any index is rethrown.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(cidlab_for_each_index)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace cidlab
