#pragma once

#include <complex>
#include <memory>

#include "kflat/sampler.hpp"

namespace kflat {

/// Parameter regime of the non-Gaussian limit: d >= 4, 3 <= k <= d-1,
/// 2k > d+1, plus the truncation height for simulating the limit variable.
struct LimitSpec {
  int d;
  int k;
  double T = 12.0;

  LimitSpec(int d_, int k_, double T_ = 12.0) : d(d_), k(k_), T(T_) {
    if (d < 4 || k < 3 || k > d - 1 || 2 * k <= d + 1)
      throw std::invalid_argument("LimitSpec: requires d>=4, 3<=k<=d-1, 2k>d+1");
    if (T <= 0.0) throw std::invalid_argument("LimitSpec: T must be positive");
  }
};

/// The constant omega_k / ((k-1) 2^{k-1}) in front of the limiting jump
/// profile.
double limit_profile_constant(int k);

/// Limiting jump profile: limit_profile_constant(k) * cosh^{-(k-1)} s.
double limit_profile(int d, int k, double s);

/// Pre-limit jump profile at radius r: slice_volume(k-flat, ball r) rescaled
/// by e^{-r(k-1)}; converges pointwise to limit_profile.
double prelimit_profile(int d, int k, double r, double s, const QuadratureSpec& quad = {});

/// l-th cumulant of the limit variable, Gamma closed form.
double limit_cumulant(int d, int k, int l, const QuadratureSpec& quad = {});

/// Same cumulant by direct quadrature of cosh^{k-l(k-1)} sinh^{d-k-1}.
double limit_cumulant_quadrature(int d, int k, int l, const QuadratureSpec& quad = {});

/// Density on (0,1) of the Levy measure of the limit variable.
double levy_density(int d, int k, double y);

/// Characteristic function of the limit variable's profile form (psi).
std::complex<double> limit_cf(int d, int k, double xi, const QuadratureSpec& quad = {});

/// log of limit_cf; usable where |psi| underflows (large xi).
std::complex<double> limit_log_cf(int d, int k, double xi, const QuadratureSpec& quad = {});

/// Characteristic function of the rescaled functional at finite radius r.
std::complex<double> prelimit_cf(int d, int k, double r, double xi,
                                 const QuadratureSpec& quad = {});

std::complex<double> prelimit_log_cf(int d, int k, double r, double xi,
                                     const QuadratureSpec& quad = {});

/// Compound-Poisson style sampler for sums over the radial point process:
/// points below the head cut are simulated exactly by inverse CDF; the band
/// above it is replaced by its exact mean plus a Gaussian whose variance comes
/// from quadrature (negligible distributional error; see tests). Draws return
/// the compensated sum  sum_i h(s_i) - E[sum].
class CompensatedRadialSum {
 public:
  /// density: omega_{d-k} cosh^k s sinh^{d-k-1} s on [0, L]; jump h(s).
  CompensatedRadialSum(int d, int k, double L, std::function<double(double)> jump,
                       const QuadratureSpec& quad, double exact_budget);

  double draw(RngStream& rng) const;

  double head_cut() const { return s_cut_; }
  double expected_head_count() const { return head_mass_; }
  double tail_sd() const { return tail_sd_; }

  /// Optional hot-path jump as a function of sinh(s); picked up by the
  /// closed-form inverse (density 2 cosh^3 s) to skip the asinh/cosh round
  /// trip.
  void set_jump_from_sinh(std::function<double(double)> f) { jump_from_sinh_ = std::move(f); }

 private:
  int d_, k_;
  double L_, s_cut_, head_mass_, head_mean_, tail_sd_;
  std::function<double(double)> jump_;
  std::function<double(double)> jump_from_sinh_;
  std::shared_ptr<const RadialSampler> head_;
  bool cubic_fast_ = false;  // closed-form inverse CDF for density 2 cosh^3 s
};

/// One draw of the (truncated) limit variable:
/// sum over the radial process of cosh^{-(k-1)} s minus the exact centering.
double sample_limit_variable(const LimitSpec& spec, RngStream& rng,
                             const QuadratureSpec& quad = {}, double exact_budget = 1e5);

/// Reusable sampler for many limit-variable draws.
class LimitVariableSampler {
 public:
  LimitVariableSampler(const LimitSpec& spec, const QuadratureSpec& quad = {},
                       double exact_budget = 1e5);
  double draw(RngStream& rng) const { return core_.draw(rng); }

 private:
  CompensatedRadialSum core_;
};

/// Simulates (F_r^{(1)} - E F_r^{(1)}) / e^{r(k-1)} for the hyperbolic k-flat
/// process through the radial marginal (exact in distribution for m=1).
class RescaledFunctionalSampler {
 public:
  RescaledFunctionalSampler(int d, int k, double r, const QuadratureSpec& quad = {},
                            double exact_budget = 1e5);
  double draw(RngStream& rng) const { return core_.draw(rng); }
  const CompensatedRadialSum& core() const { return core_; }

 private:
  CompensatedRadialSum core_;
};

}  // namespace kflat
