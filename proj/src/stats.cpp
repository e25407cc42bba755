#include "kflat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kflat {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475); }

double ks_distance(std::span<const double> samples) {
  if (samples.size() < 100) throw std::invalid_argument("ks_distance: need >= 100 samples");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double phi = normal_cdf(xs[i]);
    sup = std::max(sup, std::abs((i + 1) / n - phi));
    sup = std::max(sup, std::abs(phi - i / n));
  }
  return sup;
}

namespace {

struct KStats {
  double k1, k2, k3, k4;
};

// k-statistics from raw power sums of (already centered) data.
KStats kstats_from_sums(double n, double s1, double s2, double s3, double s4, int l_max) {
  const double mean = s1 / n;
  // central moments of the n points
  const double m2 = s2 / n - mean * mean;
  const double m3 = s3 / n - 3.0 * mean * s2 / n + 2.0 * mean * mean * mean;
  const double m4 = s4 / n - 4.0 * mean * s3 / n + 6.0 * mean * mean * s2 / n -
                    3.0 * mean * mean * mean * mean;
  KStats k{mean, 0.0, 0.0, 0.0};
  if (l_max >= 2) k.k2 = n / (n - 1.0) * m2;
  if (l_max >= 3) k.k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
  if (l_max >= 4)
    k.k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) /
           ((n - 1.0) * (n - 2.0) * (n - 3.0));
  return k;
}

}  // namespace

std::vector<CumulantEstimate> empirical_cumulants(std::span<const double> samples, int l_max) {
  if (l_max < 1 || l_max > 4) throw std::invalid_argument("empirical_cumulants: l_max in 1..4");
  const std::size_t n = samples.size();
  if (n <= static_cast<std::size_t>(l_max))
    throw std::invalid_argument("empirical_cumulants: too few samples");
  // Shift by the global mean; cumulants of order >= 2 are shift invariant and
  // the power sums stay well conditioned.
  const double shift = mean_of(samples);
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = samples[i] - shift;
    c[i] = x;
    const double x2 = x * x;
    s1 += x;
    s2 += x2;
    s3 += x2 * x;
    s4 += x2 * x2;
  }
  const KStats full = kstats_from_sums(static_cast<double>(n), s1, s2, s3, s4, l_max);
  if (l_max >= 2 && !(full.k2 > 0.0))
    throw std::runtime_error("empirical_cumulants: degenerate sample");
  const double vals[4] = {full.k1 + shift, full.k2, full.k3, full.k4};

  // Delete-1 jackknife from the same power sums.
  std::vector<double> jsum(l_max, 0.0), jsum2(l_max, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = c[i];
    const double x2 = x * x;
    const KStats del = kstats_from_sums(static_cast<double>(n - 1), s1 - x, s2 - x2,
                                        s3 - x2 * x, s4 - x2 * x2, l_max);
    const double dv[4] = {del.k1 + shift, del.k2, del.k3, del.k4};
    for (int l = 0; l < l_max; ++l) {
      jsum[l] += dv[l];
      jsum2[l] += dv[l] * dv[l];
    }
  }
  std::vector<CumulantEstimate> out(l_max);
  for (int l = 0; l < l_max; ++l) {
    const double meanj = jsum[l] / n;
    const double var = (jsum2[l] / n - meanj * meanj) * (n - 1.0);
    out[l] = CumulantEstimate{vals[l], std::sqrt(std::max(0.0, var))};
  }
  return out;
}

std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> xi_grid) {
  if (samples.empty() || xi_grid.empty())
    throw std::invalid_argument("empirical_cf: empty input");
  std::vector<std::complex<double>> out(xi_grid.size(), {0.0, 0.0});
  for (double x : samples) {
    for (std::size_t j = 0; j < xi_grid.size(); ++j) {
      const double a = xi_grid[j] * x;
      out[j] += std::complex<double>(std::cos(a), std::sin(a));
    }
  }
  for (auto& v : out) v /= static_cast<double>(samples.size());
  return out;
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / (static_cast<double>(xs.size()) - 1.0);
}

double skewness_of(std::span<const double> xs) {
  const double m = mean_of(xs);
  double s2 = 0.0, s3 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    s2 += d * d;
    s3 += d * d * d;
  }
  const double n = static_cast<double>(xs.size());
  const double sd = std::sqrt(s2 / n);
  return (s3 / n) / (sd * sd * sd);
}

double bootstrap_variance_se(std::span<const double> xs, int resamples, RngStream& rng) {
  const std::size_t n = xs.size();
  if (n < 2 || resamples < 2) throw std::invalid_argument("bootstrap_variance_se: bad input");
  std::vector<double> vars(resamples);
  for (int b = 0; b < resamples; ++b) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = xs[static_cast<std::size_t>(rng.uniform() * n)];
      s += x;
      s2 += x * x;
    }
    const double m = s / n;
    vars[b] = (s2 - n * m * m) / (n - 1.0);
  }
  const double m = mean_of(vars);
  double acc = 0.0;
  for (double v : vars) acc += (v - m) * (v - m);
  return std::sqrt(acc / (resamples - 1.0));
}

}  // namespace kflat
