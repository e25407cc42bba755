#include "kflat/measures.hpp"

#include <cmath>

namespace kflat {

namespace {

double binom(int n, int j) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0));
}

}  // namespace

double crofton_constant(int d, int k, int i) {
  if (!(0 <= i && i <= k && k <= d - 1))
    throw std::domain_error("crofton_constant: requires 0 <= i <= k <= d-1");
  return std::exp(log_omega(d + 1) + log_omega(i + 1) - log_omega(k + 1) -
                  log_omega(d - k + i + 1));
}

double hyperplane_intersection_constant(int d, int k) {
  if (!(1 <= k && k <= d - 1))
    throw std::domain_error("hyperplane_intersection_constant: requires 1 <= k <= d-1");
  return std::exp(log_omega(k + 1) - log_omega(d + 1) +
                  (d - k) * (log_omega(d + 1) - log_omega(d)));
}

double multi_intersection_constant(int d, int k, int r_count) {
  if (r_count < 1 || r_count * (d - k) > d)
    throw std::domain_error("multi_intersection_constant: requires r_count (d-k) <= d");
  const int j = d - r_count * (d - k);
  return std::exp(log_omega(j + 1) - log_omega(d + 1) +
                  r_count * (log_omega(d + 1) - log_omega(k + 1)));
}

double radial_flat_density(const SpaceSpec& space, int k, double s) {
  if (k < 0 || k > space.d - 1) throw std::domain_error("radial_flat_density: bad k");
  if (s < 0.0) throw std::domain_error("radial_flat_density: negative distance");
  if (space.kappa > 0 && s > 0.5 * 3.141592653589793 + 1e-12)
    throw std::domain_error("radial_flat_density: spherical distance exceeds pi/2");
  return omega(space.d - k) * std::pow(cs(space.kappa, s), k) *
         std::pow(sn(space.kappa, s), space.d - k - 1);
}

double flat_measure_of_ball(const SpaceSpec& space, int k, double r,
                            const QuadratureSpec& quad) {
  if (r <= 0.0) throw std::domain_error("flat_measure_of_ball: radius must be positive");
  if (space.kappa > 0 && r > 0.5 * 3.141592653589793 + 1e-12)
    throw std::domain_error("flat_measure_of_ball: spherical balls are capped at pi/2");
  return integrate([&](double s) { return radial_flat_density(space, k, s); }, 0.0, r, quad);
}

double slice_power_integral(const SpaceSpec& space, int j, int l, double r,
                            const QuadratureSpec& quad) {
  if (j < 0 || j > space.d - 1) throw std::domain_error("slice_power_integral: bad j");
  if (l < 1) throw std::domain_error("slice_power_integral: power must be >= 1");
  if (j == 0) return flat_measure_of_ball(space, 0, r, quad);
  auto integrand = [&](double s) {
    const double v = slice_volume(space, j, r, s, quad);
    return radial_flat_density(space, j, s) * std::pow(v, l);
  };
  return integrate(integrand, 0.0, r, quad);
}

double slice_power_growth(int k, int l, int d, double r) {
  if (r < 1.0) throw std::domain_error("slice_power_growth: requires r >= 1");
  if (k > d - 1 || l < 1) throw std::domain_error("slice_power_growth: bad indices");
  const int lhs = l * (k - 1);
  if (lhs < d - 1) return std::exp(r * (d - 1));
  if (lhs == d - 1) return r * std::exp(r * (d - 1));
  return std::exp(l * r * (k - 1));
}

double functional_mean(const ProcessSpec& proc, double r, const QuadratureSpec& quad) {
  const double c = multi_intersection_constant(proc.space.d, proc.k, proc.m);
  return std::pow(proc.t, proc.m) / std::tgamma(proc.m + 1.0) * c *
         ball_volume(proc.space, r, quad);
}

double kernel_prefactor(int d, int k, int m, int i, double t) {
  if (i < 1 || i > m) throw std::domain_error("kernel_prefactor: requires 1 <= i <= m");
  const double lg = (m - i) * (log_omega(d + 1) - log_omega(k + 1)) +
                    log_omega(d - m * (d - k) + 1) - log_omega(d - i * (d - k) + 1);
  return binom(m, i) * std::pow(t, m - i) / std::tgamma(m + 1.0) * std::exp(lg);
}

double functional_variance(const ProcessSpec& proc, double r, const QuadratureSpec& quad) {
  const int d = proc.space.d;
  const int k = proc.k;
  const int m = proc.m;
  double var = 0.0;
  for (int i = 1; i <= m; ++i) {
    const int j = d - i * (d - k);
    const double lg = (2 * m - i) * (log_omega(d + 1) - log_omega(k + 1)) +
                      2.0 * log_omega(d - m * (d - k) + 1) - log_omega(d + 1) -
                      log_omega(j + 1);
    const double bi = binom(m, i);
    const double a_i = bi * bi / std::pow(std::tgamma(m + 1.0), 2) * std::exp(lg) *
                       slice_power_integral(proc.space, j, 2, r, quad);
    var += std::tgamma(i + 1.0) * std::pow(proc.t, 2 * m - i) * a_i;
  }
  return var;
}

GrowthClass variance_growth(int d, int k, int m) {
  ProcessSpec check(SpaceSpec(-1, d), k, 1.0, m);  // validates the index ranges
  (void)check;
  if (2 * k < d + 1) return {GrowthKind::ExpD1, "e^{r(d-1)}"};
  if (2 * k == d + 1) return {GrowthKind::RExpD1, "r e^{r(d-1)}"};
  return {GrowthKind::Exp2K1, "e^{2r(k-1)}"};
}

GrowthClass variance_term_growth(int d, int k, int m, int i) {
  if (i < 1 || i > m) throw std::domain_error("variance_term_growth: requires 1 <= i <= m");
  const int lhs = 2 * i * (d - k);
  if (lhs > d - 1) return {GrowthKind::ExpD1, "e^{r(d-1)}"};
  if (lhs == d - 1) return {GrowthKind::RExpD1, "r e^{r(d-1)}"};
  return {GrowthKind::Exp2K1, "e^{2r(d-i(d-k)-1)}"};
}

}  // namespace kflat
