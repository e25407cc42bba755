#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "kflat/quadrature.hpp"

namespace kflat {

/// Curvature kappa in {-1,0,+1} plus the space dimension d >= 2. Selects the
/// model coordinates (Beltrami-Klein ball for kappa=-1, plain R^d for kappa=0,
/// ambient-embedded unit sphere in R^{d+1} for kappa=+1) and every
/// kappa-dependent formula.
struct SpaceSpec {
  int kappa;
  int d;

  SpaceSpec(int kappa_, int d_) : kappa(kappa_), d(d_) {
    if (kappa < -1 || kappa > 1)
      throw std::invalid_argument("SpaceSpec: kappa must be -1, 0 or +1");
    if (d < 2) throw std::invalid_argument("SpaceSpec: d must be >= 2");
  }

  /// Length of model coordinate tuples: d for kappa<=0, d+1 on the sphere.
  int coord_dim() const { return kappa > 0 ? d + 1 : d; }

  /// Largest admissible geodesic ball radius (pi/2 cap on the sphere).
  double max_radius() const;

  bool operator==(const SpaceSpec& o) const { return kappa == o.kappa && d == o.d; }
};

/// A point in model coordinates. For kappa=-1 the coordinates live strictly
/// inside the unit ball; for kappa=+1 on the unit sphere of R^{d+1}.
struct Point {
  Eigen::VectorXd coords;
};

/// Reference point ("origin"): all-zeros for kappa<=0, the last basis vector
/// (north pole) for kappa=+1.
Point origin(const SpaceSpec& space);

/// Throws std::domain_error if the coordinates violate the model constraints.
void validate_point(const SpaceSpec& space, const Point& p);

/// Modified sine: sin s / s / sinh s for kappa = +1 / 0 / -1.
double sn(int kappa, double s);

/// Modified cosine: cos s / 1 / cosh s for kappa = +1 / 0 / -1.
double cs(int kappa, double s);

/// Surface content of the unit (l-1)-sphere, omega_l = 2 pi^{l/2} / Gamma(l/2).
double omega(int l);

/// log of omega(l); ratios of omegas are assembled in log-Gamma space so that
/// the constants stay finite for d up to ~20.
double log_omega(int l);

/// Geodesic distance between two model points.
double distance(const SpaceSpec& space, const Point& x, const Point& y);

/// Integral of sn_kappa(u)^n over [0, U]. Closed forms for n <= 3 and a stable
/// recurrence above; the kernel of every ball/slice volume in the library.
double sn_power_integral(int kappa, int n, double U);

/// Intrinsic radius of the slice that a flat at distance s from the ball
/// center cuts out of the ball of radius r (the slice is itself a geodesic
/// ball of this radius inside the flat).
double slice_radius(const SpaceSpec& space, double r, double s);

/// Volume of the geodesic ball of radius r in the j-dimensional space form of
/// curvature kappa: omega_j * int_0^r sn^{j-1}.
double ball_volume_dim(int kappa, int j, double r);

/// Volume of the geodesic ball of radius r in the given space.
double ball_volume(const SpaceSpec& space, double r, const QuadratureSpec& quad = {});

/// j-dimensional volume of (j-flat at distance s from the center) intersected
/// with the ball of radius r. j=0 uses the counting convention 1{s <= r}.
double slice_volume(const SpaceSpec& space, int j, double r, double s,
                    const QuadratureSpec& quad = {});

}  // namespace kflat
