// Benchmark: serial reference vs OpenMP execution of the replicate engines.
// Verifies that both paths produce identical results, then reports timings.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "kflat/limitlaw.hpp"
#include "kflat/parallel.hpp"
#include "kflat/studies.hpp"

using namespace kflat;

namespace {

void bench_replicates(const char* name, std::int64_t n,
                      const std::function<double(RngStream&)>& f) {
  using clock = std::chrono::steady_clock;

  const auto t0 = clock::now();
  const auto serial = replicate_values(n, 1, 0, false, f);
  const double st = std::chrono::duration<double>(clock::now() - t0).count();

  const auto t1 = clock::now();
  const auto parallel = replicate_values(n, 1, 0, true, f);
  const double pt = std::chrono::duration<double>(clock::now() - t1).count();

  const bool identical = serial == parallel;
  std::printf("%-34s n=%-8lld serial %7.3fs  openmp %7.3fs  speedup %.2fx  %s\n", name,
              static_cast<long long>(n), st, pt, st / pt,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("openmp available: %s\n", par::kHaveOpenMP ? "yes" : "no");

  {
    const SpaceSpec space(-1, 2);
    flat_distance_sampler(space, 1, 3.0);  // warm the cache outside the timing
    bench_replicates("process + order-2 functional", 4000, [&](RngStream& rng) {
      const auto s = sample_process(space, 1, 1.0, 3.0, rng);
      return intersection_functional(s, BallWindow{3.0}, 2).value;
    });
  }
  {
    RescaledFunctionalSampler sampler(4, 3, 6.0, QuadratureSpec{}, 2e4);
    bench_replicates("rescaled volume draws (d=4,k=3)", 2000,
                     [&](RngStream& rng) { return sampler.draw(rng); });
  }
  {
    const SpaceSpec space(-1, 3);
    bench_replicates("pair sampling double integral", 200000, [&](RngStream& rng) {
      const Point x = sample_point_in_ball(space, 1.5, rng);
      const Point y = sample_point_in_ball(space, 1.5, rng);
      const double u = sn(-1, distance(space, x, y));
      return 1.0 / (u * u);
    });
  }
  {
    // one large configuration, subset-partitioned functional: the serial and
    // OpenMP executions share the partial-sum structure and must agree
    // bitwise; the plain recursive path is the reference up to roundoff.
    const SpaceSpec space(-1, 3);
    RngStream rng(2, 0);
    FlatProcessSample s{space, 2, 1.0, 4.0, {}, 2, 0, 0};
    for (int i = 0; i < 400; ++i) s.flats.push_back(sample_flat(space, 2, 4.0, rng));
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto a =
        intersection_functional_parallel(s, BallWindow{4.0}, 2, 1e-8, par::Exec::Serial);
    const double st = std::chrono::duration<double>(clock::now() - t0).count();
    const auto t1 = clock::now();
    const auto b =
        intersection_functional_parallel(s, BallWindow{4.0}, 2, 1e-8, par::Exec::OpenMP);
    const double pt = std::chrono::duration<double>(clock::now() - t1).count();
    const auto ref = intersection_functional(s, BallWindow{4.0}, 2);
    const bool bitwise = a.value == b.value;
    const bool close = std::abs(ref.value - b.value) <= 1e-12 * std::abs(ref.value);
    std::printf("%-34s n=%-8d serial %7.3fs  openmp %7.3fs  speedup %.2fx  %s, %s\n",
                "subset-parallel functional", 400, st, pt, st / pt,
                bitwise ? "identical" : "MISMATCH",
                close ? "matches reference" : "REFERENCE MISMATCH");
  }
  return 0;
}
