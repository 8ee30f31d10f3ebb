#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace mtaudit {

enum class Exec { Serial, Parallel };

int max_threads();

namespace detail {
void omp_for(std::size_t n, void (*body)(std::size_t, void*), void* ctx);
}

// Runs fn(i) for i in [0, n). Under Exec::Parallel iterations are spread
// over OpenMP threads. An exception from any iteration is rethrown after the
// loop; when several iterations throw, the lowest index wins so the error
// seen is the same one the serial loop would raise.
template <typename Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  struct Ctx {
    Fn* fn;
    std::vector<std::exception_ptr>* errors;
  } ctx{&fn, &errors};
  detail::omp_for(
      n,
      [](std::size_t i, void* raw) {
        auto* c = static_cast<Ctx*>(raw);
        try {
          (*c->fn)(i);
        } catch (...) {
          (*c->errors)[i] = std::current_exception();
        }
      },
      &ctx);
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mtaudit
