#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace jetext {

/// Selects between the serial reference loop and the OpenMP kernel.
/// Both paths produce bitwise-identical results: work is split per index
/// and every reduction is combined serially in index order.
enum class Exec { kSerial, kParallel };

namespace detail {

// Calls body(i) for i in [0, n). The parallel path uses dynamic scheduling
// since per-index cost varies (QP iterations, triangular pair loops).
// Exceptions cannot leave an OpenMP region; the one raised at the lowest
// index is captured and rethrown after the loop, matching the serial path.
template <typename Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  const auto count = static_cast<long long>(n);
  if (exec == Exec::kSerial) {
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  bool any_error = false;
#pragma omp parallel for schedule(dynamic, 8) reduction(|| : any_error)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      any_error = true;
    }
  }
  if (any_error) {
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail
}  // namespace jetext
