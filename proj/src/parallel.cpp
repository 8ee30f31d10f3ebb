#include "mtaudit/parallel.hpp"

#include <omp.h>

namespace mtaudit {

int max_threads() { return omp_get_max_threads(); }

namespace detail {

void omp_for(std::size_t n, void (*body)(std::size_t, void*), void* ctx) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < count; ++i) {
    body(static_cast<std::size_t>(i), ctx);
  }
}

}  // namespace detail
}  // namespace mtaudit
