#pragma once

#include <string>

#include "kflat/space.hpp"

namespace kflat {

/// Parameters of a Poisson k-flat process observed at intersection order m.
struct ProcessSpec {
  SpaceSpec space;
  int k;
  double t;
  int m;

  ProcessSpec(SpaceSpec s, int k_, double t_, int m_) : space(s), k(k_), t(t_), m(m_) {
    if (k < 0 || k > space.d - 1) throw std::invalid_argument("ProcessSpec: bad k");
    if (t <= 0.0) throw std::invalid_argument("ProcessSpec: intensity must be positive");
    if (m < 1 || space.d - m * (space.d - k) < 0)
      throw std::invalid_argument("ProcessSpec: requires d - m(d-k) >= 0");
  }
};

/// Crofton constant omega_{d+1} omega_{i+1} / (omega_{k+1} omega_{d-k+i+1}).
double crofton_constant(int d, int k, int i);

/// Constant relating the k-flat measure to a product of d-k hyperplane
/// measures: (omega_{k+1}/omega_{d+1}) (omega_{d+1}/omega_d)^{d-k}.
double hyperplane_intersection_constant(int d, int k);

/// Constant turning an r_count-fold flat integral of a function of the common
/// intersection into a single integral over (d - r_count(d-k))-flats.
double multi_intersection_constant(int d, int k, int r_count);

/// Density of the invariant k-flat measure pushed to the distance-from-origin
/// coordinate: omega_{d-k} cs(s)^k sn(s)^{d-k-1}.
double radial_flat_density(const SpaceSpec& space, int k, double s);

/// Total invariant measure of the k-flats hitting the ball of radius r.
double flat_measure_of_ball(const SpaceSpec& space, int k, double r,
                            const QuadratureSpec& quad = {});

/// Integral over all j-flats of (slice volume)^l for the ball of radius r.
/// j=0 uses the point-process convention (returns the 0-flat measure of the
/// ball, independent of l).
double slice_power_integral(const SpaceSpec& space, int j, int l, double r,
                            const QuadratureSpec& quad = {});

/// Growth order of the slice power integral in hyperbolic space as r grows:
/// e^{r(d-1)}, r e^{r(d-1)} or e^{l r(k-1)} keyed on l(k-1) vs d-1.
double slice_power_growth(int k, int l, int d, double r);

/// Exact mean of the order-m intersection volume functional on a ball window.
double functional_mean(const ProcessSpec& proc, double r, const QuadratureSpec& quad = {});

/// Exact variance of the order-m intersection volume functional on a ball
/// window, assembled from the chaos-level terms.
double functional_variance(const ProcessSpec& proc, double r, const QuadratureSpec& quad = {});

/// The constant in front of the i-th chaos kernel:
/// binom(m,i) t^{m-i}/m! (omega_{d+1}/omega_{k+1})^{m-i}
///   omega_{d-m(d-k)+1}/omega_{d-i(d-k)+1}.
double kernel_prefactor(int d, int k, int m, int i, double t);

enum class GrowthKind { ExpD1, RExpD1, Exp2K1 };

struct GrowthClass {
  GrowthKind kind;
  std::string rate_description;
};

/// Growth class of Var F^(m) as r -> infinity (hyperbolic), keyed on the sign
/// of 2k - (d+1).
GrowthClass variance_growth(int d, int k, int m);

/// Growth class of the i-th variance term, keyed on 2i(d-k) vs d-1.
GrowthClass variance_term_growth(int d, int k, int m, int i);

}  // namespace kflat
