#include "kflat/limitlaw.hpp"

#include <cmath>

namespace kflat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_regime(int d, int k) {
  if (d < 4 || k < 3 || k > d - 1 || 2 * k <= d + 1)
    throw std::domain_error("limit law: requires d>=4, 3<=k<=d-1, 2k>d+1");
}

double sin_minus_x(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return std::sin(x) - x;
}

double cos_minus_one(double x) {
  const double s = std::sin(0.5 * x);
  return -2.0 * s * s;
}

// int_0^U sinh^2, given q = cosh U >= 1; stable for q near 1.
double sinh2_integral_from_cosh(double q) {
  if (q <= 1.0) return 0.0;
  const double sh = std::sqrt((q - 1.0) * (q + 1.0));
  if (sh < 0.01) {
    const double s2 = sh * sh;
    return 0.5 * sh * s2 * (2.0 / 3.0 - s2 * (1.0 / 5.0 - s2 * (3.0 / 28.0)));
  }
  return 0.5 * (sh * q - std::log(q + sh));
}

}  // namespace

double limit_profile_constant(int k) {
  if (k < 2) throw std::domain_error("limit_profile_constant: requires k >= 2");
  return omega(k) / ((k - 1) * std::pow(2.0, k - 1));
}

double limit_profile(int d, int k, double s) {
  if (s < 0.0) throw std::domain_error("limit_profile: negative argument");
  (void)d;
  return limit_profile_constant(k) * std::pow(std::cosh(s), -(k - 1));
}

double prelimit_profile(int d, int k, double r, double s, const QuadratureSpec& quad) {
  if (s < 0.0 || s > r) throw std::domain_error("prelimit_profile: requires 0 <= s <= r");
  (void)d;
  return slice_volume(SpaceSpec(-1, std::max(k + 1, 2)), k, r, s, quad) *
         std::exp(-r * (k - 1));
}

double limit_cumulant(int d, int k, int l, const QuadratureSpec& quad) {
  (void)quad;
  require_regime(d, k);
  if (l < 2) throw std::domain_error("limit_cumulant: requires l >= 2");
  const double a = k - static_cast<double>(l) * (k - 1);
  const double b = d - k - 1;
  // omega_{d-k} * (1/2) Gamma(-(a+b)/2) Gamma((b+1)/2) / Gamma((1-a)/2)
  const double lg = std::lgamma(-0.5 * (a + b)) + std::lgamma(0.5 * (b + 1.0)) -
                    std::lgamma(0.5 * (1.0 - a));
  return omega(d - k) * 0.5 * std::exp(lg);
}

double limit_cumulant_quadrature(int d, int k, int l, const QuadratureSpec& quad) {
  require_regime(d, k);
  if (l < 2) throw std::domain_error("limit_cumulant_quadrature: requires l >= 2");
  const double a = k - static_cast<double>(l) * (k - 1);
  const double b = d - k - 1;
  auto f = [a, b](double s) {
    return std::pow(std::cosh(s), a) * std::pow(std::sinh(s), b);
  };
  return omega(d - k) * integrate_to_infinity(f, 0.0, quad);
}

double levy_density(int d, int k, double y) {
  require_regime(d, k);
  if (!(y > 0.0 && y < 1.0)) throw std::domain_error("levy_density: y must lie in (0,1)");
  const double expo = static_cast<double>(d + k - 2) / (k - 1);
  const double inner = 1.0 - std::pow(y, 2.0 / (k - 1));
  return omega(d - k) / (k - 1) * std::pow(y, -expo) *
         std::pow(inner, 0.5 * (d - k) - 1.0);
}

namespace {

std::complex<double> log_cf_from_profile(int d, int k, double xi,
                                         const std::function<double(double)>& profile,
                                         double upper, const QuadratureSpec& quad) {
  if (xi == 0.0) return {0.0, 0.0};
  const double w0 = omega(d - k);
  auto weight = [&](double s) {
    return w0 * std::pow(std::cosh(s), k) * std::pow(std::sinh(s), d - k - 1);
  };
  const double re = integrate(
      [&](double s) { return cos_minus_one(xi * profile(s)) * weight(s); }, 0.0, upper, quad);
  const double im = integrate(
      [&](double s) { return sin_minus_x(xi * profile(s)) * weight(s); }, 0.0, upper, quad);
  return {re, im};
}

std::complex<double> exp_cf(const std::complex<double>& log_cf) {
  return std::exp(log_cf.real()) * std::complex<double>(std::cos(log_cf.imag()),
                                                        std::sin(log_cf.imag()));
}

}  // namespace

std::complex<double> limit_log_cf(int d, int k, double xi, const QuadratureSpec& quad) {
  require_regime(d, k);
  if (xi == 0.0) return {0.0, 0.0};
  // Truncate where the envelope (xi^2/2) g(s)^2 e^{s(d-1)} drops below abs_tol.
  const double ck = limit_profile_constant(k);
  const double rate = 2.0 * k - d - 1.0;
  const double env0 = 0.5 * xi * xi * ck * ck * std::pow(4.0, k - 1) * omega(d - k);
  const double S =
      std::max(5.0, std::log(std::max(1.0, env0 / (quad.abs_tol * rate))) / rate);
  return log_cf_from_profile(
      d, k, xi, [d, k](double s) { return limit_profile(d, k, s); }, S, quad);
}

std::complex<double> limit_cf(int d, int k, double xi, const QuadratureSpec& quad) {
  return exp_cf(limit_log_cf(d, k, xi, quad));
}

std::complex<double> prelimit_log_cf(int d, int k, double r, double xi,
                                     const QuadratureSpec& quad) {
  require_regime(d, k);
  if (r <= 0.0) throw std::domain_error("prelimit_cf: r must be positive");
  if (xi == 0.0) return {0.0, 0.0};
  return log_cf_from_profile(
      d, k, xi, [d, k, r, &quad](double s) { return prelimit_profile(d, k, r, s, quad); }, r,
      quad);
}

std::complex<double> prelimit_cf(int d, int k, double r, double xi,
                                 const QuadratureSpec& quad) {
  return exp_cf(prelimit_log_cf(d, k, r, xi, quad));
}

CompensatedRadialSum::CompensatedRadialSum(int d, int k, double L,
                                           std::function<double(double)> jump,
                                           const QuadratureSpec& quad, double exact_budget)
    : d_(d), k_(k), L_(L), jump_(std::move(jump)) {
  if (L <= 0.0) throw std::domain_error("CompensatedRadialSum: empty range");
  if (exact_budget < 10.0) throw std::domain_error("CompensatedRadialSum: budget too small");
  const SpaceSpec space(-1, d);
  auto mass = [&](double s) { return flat_measure_of_ball(space, k, s, quad); };
  const double full = mass(L);
  if (full <= exact_budget) {
    s_cut_ = L;
    head_mass_ = full;
  } else {
    double lo = 0.0, hi = L;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * L; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mass(mid) <= exact_budget ? lo : hi) = mid;
    }
    s_cut_ = lo;
    head_mass_ = mass(s_cut_);
  }
  const double w0 = omega(d - k);
  auto weighted = [&](double s, int pow_h) {
    const double h = jump_(s);
    return (pow_h == 1 ? h : h * h) * w0 * std::pow(std::cosh(s), k) *
           std::pow(std::sinh(s), d - k - 1);
  };
  // Head is compensated by its own mean; the tail band's compensated sum is
  // replaced by a centered Gaussian carrying its exact variance.
  head_mean_ = integrate([&](double s) { return weighted(s, 1); }, 0.0, s_cut_, quad);
  double tail_var = 0.0;
  if (s_cut_ < L_)
    tail_var = integrate([&](double s) { return weighted(s, 2); }, s_cut_, L_, quad);
  tail_sd_ = std::sqrt(std::max(0.0, tail_var));
  head_ = std::shared_ptr<const RadialSampler>(
      new RadialSampler(-1, k, d - k - 1, 0.0, s_cut_, w0, quad));
  cubic_fast_ = (d - k - 1 == 0) && (k == 3);
}

namespace {

// Inverse of u = 2(x + x^3/3) (the cumulative of 2 cosh^3 in x = sinh s).
inline double cubic_inverse(double u) {
  const double t = 0.75 * u;
  const double disc = std::sqrt(t * t + 1.0);
  const double w = std::cbrt(t + disc);
  return w - 1.0 / w;
}

}  // namespace

double CompensatedRadialSum::draw(RngStream& rng) const {
  const std::int64_t n = rng.poisson(head_mass_);
  double sum = 0.0;
  if (cubic_fast_ && jump_from_sinh_) {
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = rng.uniform() * head_mass_;
      sum += jump_from_sinh_(cubic_inverse(u));
    }
  } else if (cubic_fast_) {
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = rng.uniform() * head_mass_;
      sum += jump_(std::asinh(cubic_inverse(u)));
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) sum += jump_(head_->draw(rng));
  }
  double out = sum - head_mean_;
  if (tail_sd_ > 0.0) out += tail_sd_ * rng.normal();
  return out;
}

double sample_limit_variable(const LimitSpec& spec, RngStream& rng, const QuadratureSpec& quad,
                             double exact_budget) {
  LimitVariableSampler sampler(spec, quad, exact_budget);
  return sampler.draw(rng);
}

LimitVariableSampler::LimitVariableSampler(const LimitSpec& spec, const QuadratureSpec& quad,
                                           double exact_budget)
    : core_(spec.d, spec.k,
            spec.T, [k = spec.k](double s) { return std::pow(std::cosh(s), -(k - 1)); }, quad,
            exact_budget) {
  if (spec.k == 3)
    core_.set_jump_from_sinh([](double x) { return 1.0 / (1.0 + x * x); });
}

RescaledFunctionalSampler::RescaledFunctionalSampler(int d, int k, double r,
                                                     const QuadratureSpec& quad,
                                                     double exact_budget)
    : core_(
          d, k, r,
          [d, k, r, scale = std::exp(-r * (k - 1.0)), coshr = std::cosh(r)](double s) {
            if (k == 3) {
              const double q = coshr / std::cosh(s);
              return 4.0 * kPi * sinh2_integral_from_cosh(q) * scale;
            }
            return slice_volume(SpaceSpec(-1, d), k, r, std::min(s, r)) * scale;
          },
          quad, exact_budget) {
  require_regime(d, k);
  if (k == 3) {
    const double scale = std::exp(-r * (k - 1.0));
    const double coshr = std::cosh(r);
    core_.set_jump_from_sinh([scale, coshr](double x) {
      const double q = coshr / std::sqrt(1.0 + x * x);
      return 4.0 * kPi * sinh2_integral_from_cosh(q) * scale;
    });
  }
}

}  // namespace kflat
