#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace gecqe {

// Every data-parallel kernel in the library takes an Exec argument. The
// serial path is the reference implementation; the parallel path must produce
// bit-identical results (work items are independent and any reduction is done
// afterwards in index order).
enum class Exec { serial, parallel };

// Runs fn(i) for i in [0, n). Exceptions thrown by fn are captured and the
// first one is rethrown after the loop.
template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace gecqe
