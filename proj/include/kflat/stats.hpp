#pragma once

#include <complex>
#include <span>
#include <vector>

#include "kflat/rng.hpp"

namespace kflat {

/// Kolmogorov distance between the empirical distribution of the samples and
/// the standard normal distribution function.
double ks_distance(std::span<const double> samples);

struct CumulantEstimate {
  double value;
  double std_error;  // delete-1 jackknife
};

/// Unbiased cumulant estimators (k-statistics) up to order l_max <= 4, with
/// jackknife standard errors.
std::vector<CumulantEstimate> empirical_cumulants(std::span<const double> samples, int l_max);

/// Sample average of e^{i xi x} on a grid of frequencies.
std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> xi_grid);

double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs);  // unbiased
double skewness_of(std::span<const double> xs);

/// Bootstrap standard error of the sample variance.
double bootstrap_variance_se(std::span<const double> xs, int resamples, RngStream& rng);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace kflat
