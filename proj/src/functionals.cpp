#include "kflat/functionals.hpp"

#include <cmath>

#include "kflat/parallel.hpp"

namespace kflat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double binom_count(std::int64_t n, int m) {
  double c = 1.0;
  for (int j = 0; j < m; ++j) c *= static_cast<double>(n - j) / (j + 1);
  return c;
}

}  // namespace

double flat_ball_volume(const Flat& flat, double r) {
  const auto& sp = flat.space;
  const double s = flat_distance_to_origin(flat);
  if (flat.k == 0) {
    if (sp.kappa > 0) {
      // A 0-flat on the sphere is an antipodal pair; count each point.
      double cnt = s < r ? 1.0 : 0.0;
      if (kPi - s < r) cnt += 1.0;
      return cnt;
    }
    return s < r ? 1.0 : 0.0;
  }
  if (s >= r) return 0.0;
  return slice_volume(sp, flat.k, r, s);
}

std::pair<double, double> flat_window_volume_mc(const Flat& flat, const GeneralWindow& window,
                                                std::int64_t n_points, RngStream& rng) {
  const auto& sp = flat.space;
  const double s = flat_distance_to_origin(flat);
  const double rb = window.bounding_radius;
  if (flat.k == 0) {
    if (sp.kappa > 0) {
      double cnt = 0.0;
      const Eigen::VectorXd v = flat.frame.col(0);
      if (window.membership(Point{v})) cnt += 1.0;
      if (window.membership(Point{-v})) cnt += 1.0;
      return {cnt, 0.0};
    }
    return {s < rb && window.membership(Point{flat.foot}) ? 1.0 : 0.0, 0.0};
  }
  if (s >= rb) return {0.0, 0.0};
  // The slice through the bounding ball is an intrinsic k-ball; sample it
  // uniformly (radius from the intrinsic volume density, direction uniform).
  const double rho_max = slice_radius(sp, rb, s);
  const double vol = slice_volume(sp, flat.k, rb, s);
  RadialSampler radial(sp.kappa, 0, flat.k - 1, 0.0, rho_max, 1.0);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n_points; ++i) {
    const double rho = radial.draw(rng);
    const Eigen::VectorXd w = uniform_direction(flat.k, rng);
    if (window.membership(flat_point(flat, w, rho))) ++hits;
  }
  const double p = static_cast<double>(hits) / n_points;
  const double se = vol * std::sqrt(std::max(0.0, p * (1.0 - p) / n_points));
  return {vol * p, se};
}

namespace {

struct TupleAccumulator {
  double value = 0.0;
  double se2 = 0.0;
  std::int64_t tuples = 0;
  std::int64_t empties = 0;
  std::int64_t degenerates = 0;
};

// Depth-first over index subsets i_0 < i_1 < ... with incremental
// intersections; partial[depth] is the intersection of the chosen prefix.
void recurse(const FlatProcessSample& sample, const Window& window, int m, double rank_tol,
             RngStream* rng, int depth, int first, const Flat* partial, TupleAccumulator& acc) {
  const auto& sp = sample.space;
  const int n = static_cast<int>(sample.flats.size());
  for (int i = first; i < n; ++i) {
    IntersectResult res;
    const Flat* cur = nullptr;
    std::optional<Flat> merged;
    if (depth == 0) {
      cur = &sample.flats[i];
    } else {
      const int expected = partial->k - (sp.d - sample.k);
      res = intersect_stack(sp, {*partial, sample.flats[i]}, rank_tol, expected);
      if (res.kind == IntersectKind::Empty) {
        ++acc.empties;
        acc.tuples += static_cast<std::int64_t>(binom_count(n - 1 - i, m - 1 - depth));
        continue;
      }
      if (res.kind == IntersectKind::Degenerate) {
        ++acc.degenerates;
        acc.tuples += static_cast<std::int64_t>(binom_count(n - 1 - i, m - 1 - depth));
        continue;
      }
      merged = std::move(res.flat);
      cur = &*merged;
    }
    if (depth == m - 1) {
      ++acc.tuples;
      if (std::holds_alternative<BallWindow>(window)) {
        acc.value += flat_ball_volume(*cur, std::get<BallWindow>(window).r);
      } else {
        const auto& gw = std::get<GeneralWindow>(window);
        auto [v, se] = flat_window_volume_mc(*cur, gw, gw.mc_points, *rng);
        acc.value += v;
        acc.se2 += se * se;
      }
    } else {
      recurse(sample, window, m, rank_tol, rng, depth + 1, i + 1, cur, acc);
    }
  }
}

}  // namespace

FunctionalResult intersection_functional(const FlatProcessSample& sample, const Window& window,
                                         int m, double rank_tol, RngStream* rng) {
  const auto& sp = sample.space;
  if (m < 1 || sp.d - m * (sp.d - sample.k) < 0)
    throw std::domain_error("intersection_functional: requires d - m(d-k) >= 0");
  if (std::holds_alternative<GeneralWindow>(window) && rng == nullptr)
    throw std::invalid_argument("intersection_functional: general windows need an rng");
  const std::int64_t n = static_cast<std::int64_t>(sample.flats.size());
  if (binom_count(n, m) > 1e8)
    throw std::runtime_error("intersection_functional: subset count exceeds 1e8");
  TupleAccumulator acc;
  if (n >= m) recurse(sample, window, m, rank_tol, rng, 0, 0, nullptr, acc);
  return FunctionalResult{acc.value, acc.tuples, acc.empties, acc.degenerates,
                          std::sqrt(acc.se2)};
}

FunctionalResult intersection_functional_parallel(const FlatProcessSample& sample,
                                                  const BallWindow& window, int m,
                                                  double rank_tol, par::Exec exec) {
  const auto& sp = sample.space;
  if (m < 1 || sp.d - m * (sp.d - sample.k) < 0)
    throw std::domain_error("intersection_functional: requires d - m(d-k) >= 0");
  const std::int64_t n = static_cast<std::int64_t>(sample.flats.size());
  if (binom_count(n, m) > 1e8)
    throw std::runtime_error("intersection_functional: subset count exceeds 1e8");
  if (n < m) return FunctionalResult{};
  // Partition by leading index; per-index partial results are reduced in a
  // fixed order afterwards so the outcome is worker-count invariant.
  std::vector<TupleAccumulator> parts(n);
  const Window w = window;
  par::for_each_index(n, exec, [&](std::int64_t i) {
    if (m == 1) {
      parts[i].value = flat_ball_volume(sample.flats[i], window.r);
      parts[i].tuples = 1;
      return;
    }
    recurse(sample, w, m, rank_tol, nullptr, 1, static_cast<int>(i) + 1,
            &sample.flats[i], parts[i]);
  });
  FunctionalResult out;
  std::vector<double> vals(n);
  for (std::int64_t i = 0; i < n; ++i) {
    vals[i] = parts[i].value;
    out.tuples_evaluated += parts[i].tuples;
    out.empty_count += parts[i].empties;
    out.degenerate_count += parts[i].degenerates;
  }
  out.value = par::reduce_sum(vals);
  return out;
}

double chaos_kernel(const ProcessSpec& proc, int i, const std::vector<Flat>& flats,
                    const BallWindow& window, double rank_tol, const QuadratureSpec& quad) {
  (void)quad;
  if (i < 1 || i > proc.m) throw std::domain_error("chaos_kernel: requires 1 <= i <= m");
  if (static_cast<int>(flats.size()) != i)
    throw std::invalid_argument("chaos_kernel: expected exactly i flats");
  const double pf = kernel_prefactor(proc.space.d, proc.k, proc.m, i, proc.t);
  double vol;
  if (i == 1) {
    vol = flat_ball_volume(flats[0], window.r);
  } else {
    const int expected = proc.space.d - i * (proc.space.d - proc.k);
    const IntersectResult res = intersect_stack(proc.space, flats, rank_tol, expected);
    if (res.kind != IntersectKind::Proper) return 0.0;
    vol = flat_ball_volume(*res.flat, window.r);
  }
  return pf * vol;
}

double standardize(double value, double mean, double variance) {
  if (!(variance > 0.0)) throw std::domain_error("standardize: variance must be positive");
  return (value - mean) / std::sqrt(variance);
}

double rescale_limit(double value, double mean, double r, int k) {
  return (value - mean) * std::exp(-r * (k - 1));
}

}  // namespace kflat
