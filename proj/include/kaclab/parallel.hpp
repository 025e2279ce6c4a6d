#ifndef KACLAB_PARALLEL_HPP
#define KACLAB_PARALLEL_HPP

// Every data-parallel kernel takes an Exec tag. Exec::serial is the reference
// path used by the tests; Exec::parallel runs the same body under OpenMP.
// Bodies write to disjoint slots and reductions happen afterwards in index
// order, so both paths give bit-identical results.

#include <cstddef>

namespace kac {

enum class Exec { serial, parallel };

template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::parallel) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

/// Static schedule for cheap, uniform iterations (grid sweeps).
template <class Body>
void for_each_index_static(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::parallel) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace kac

#endif
