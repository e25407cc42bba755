#pragma once

#include <cstdint>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kflat::par {

enum class Exec { Serial, OpenMP };

#ifdef _OPENMP
inline constexpr bool kHaveOpenMP = true;
#else
inline constexpr bool kHaveOpenMP = false;
#endif

/// Runs f(i) for i in [0, n). The OpenMP path distributes indices across
/// threads; callers make f(i) independent (per-index RNG streams, per-index
/// output slots) so both paths produce identical results.
template <class F>
void for_each_index(std::int64_t n, Exec exec, F&& f) {
#ifdef _OPENMP
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

/// Sequential compensated (Kahan) sum; the deterministic reduction used after
/// parallel fills so totals are worker-count invariant.
inline double reduce_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace kflat::par
