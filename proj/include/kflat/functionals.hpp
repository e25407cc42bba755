#pragma once

#include <functional>
#include <variant>

#include "kflat/parallel.hpp"
#include "kflat/sampler.hpp"

namespace kflat {

/// Observation windows: geodesic balls get exact slice-volume evaluation,
/// general membership predicates get hit-or-miss Monte Carlo volumes.
struct BallWindow {
  double r;
};

struct GeneralWindow {
  std::function<bool(const Point&)> membership;
  double bounding_radius;
  std::int64_t mc_points = 100000;
};

using Window = std::variant<BallWindow, GeneralWindow>;

struct FunctionalResult {
  double value = 0.0;
  std::int64_t tuples_evaluated = 0;
  std::int64_t empty_count = 0;
  std::int64_t degenerate_count = 0;
  double mc_se = 0.0;  // 0 for exact ball evaluation
};

/// Total (d-m(d-k))-volume inside the window of all m-fold intersections of
/// distinct flats of the sample. Unordered subsets are enumerated with
/// incremental intersection and early exit on Empty; degenerate tuples
/// contribute zero and are counted. General windows need an rng for the
/// hit-or-miss volume estimate.
FunctionalResult intersection_functional(const FlatProcessSample& sample, const Window& window,
                                         int m, double rank_tol = 1e-8,
                                         RngStream* rng = nullptr);

/// Same value up to summation order; evaluation is partitioned by leading
/// index and reduced in a fixed order, so the serial and OpenMP executions of
/// this function are bit-identical to each other (and agree with the plain
/// path to roundoff). Ball windows only.
FunctionalResult intersection_functional_parallel(
    const FlatProcessSample& sample, const BallWindow& window, int m, double rank_tol = 1e-8,
    par::Exec exec = par::Exec::OpenMP);

/// Value of the i-th chaos kernel at an i-tuple of flats for a ball window:
/// kernel_prefactor times the volume of the i-fold intersection in the ball.
double chaos_kernel(const ProcessSpec& proc, int i, const std::vector<Flat>& flats,
                    const BallWindow& window, double rank_tol = 1e-8,
                    const QuadratureSpec& quad = {});

/// (value - mean) / sqrt(variance).
double standardize(double value, double mean, double variance);

/// (value - mean) / e^{r(k-1)}, the rescaling of the non-Gaussian regime.
double rescale_limit(double value, double mean, double r, int k);

/// Volume of (flat intersect ball of radius r about the origin); exact via the
/// slice formula. Used by both functional paths.
double flat_ball_volume(const Flat& flat, double r);

/// Hit-or-miss volume of (flat intersect general window): uniform points on
/// the flat's slice through the bounding ball. Returns the estimate and its
/// standard error.
std::pair<double, double> flat_window_volume_mc(const Flat& flat, const GeneralWindow& window,
                                                std::int64_t n_points, RngStream& rng);

}  // namespace kflat
