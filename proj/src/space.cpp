#include "kflat/space.hpp"

#include <cmath>
#include <limits>

namespace kflat {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kModelSlack = 1e-12;
}  // namespace

double SpaceSpec::max_radius() const {
  return kappa > 0 ? 0.5 * kPi : std::numeric_limits<double>::infinity();
}

Point origin(const SpaceSpec& space) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space.coord_dim());
  if (space.kappa > 0) c(space.d) = 1.0;
  return Point{std::move(c)};
}

void validate_point(const SpaceSpec& space, const Point& p) {
  if (p.coords.size() != space.coord_dim())
    throw std::domain_error("Point: coordinate length does not match the model");
  const double n = p.coords.norm();
  if (space.kappa < 0 && n >= 1.0 + kModelSlack)
    throw std::domain_error("Point: Beltrami-Klein coordinates must lie in the open unit ball");
  if (space.kappa < 0 && n >= 1.0)
    throw std::domain_error("Point: Beltrami-Klein coordinates on/outside the unit sphere");
  if (space.kappa > 0 && std::abs(n - 1.0) > kModelSlack)
    throw std::domain_error("Point: spherical coordinates must have unit norm");
}

double sn(int kappa, double s) {
  if (s < 0.0) throw std::domain_error("sn: negative argument");
  switch (kappa) {
    case 1: return std::sin(s);
    case 0: return s;
    case -1: return std::sinh(s);
    default: throw std::invalid_argument("sn: kappa must be -1, 0 or +1");
  }
}

double cs(int kappa, double s) {
  if (s < 0.0) throw std::domain_error("cs: negative argument");
  switch (kappa) {
    case 1: return std::cos(s);
    case 0: return 1.0;
    case -1: return std::cosh(s);
    default: throw std::invalid_argument("cs: kappa must be -1, 0 or +1");
  }
}

double log_omega(int l) {
  if (l <= 0) throw std::domain_error("omega: l must be positive");
  return std::log(2.0) + 0.5 * l * std::log(kPi) - std::lgamma(0.5 * l);
}

double omega(int l) { return std::exp(log_omega(l)); }

double distance(const SpaceSpec& space, const Point& x, const Point& y) {
  validate_point(space, x);
  validate_point(space, y);
  switch (space.kappa) {
    case 0:
      return (x.coords - y.coords).norm();
    case -1: {
      const double nx2 = x.coords.squaredNorm();
      const double ny2 = y.coords.squaredNorm();
      const double c = (1.0 - x.coords.dot(y.coords)) / std::sqrt((1.0 - nx2) * (1.0 - ny2));
      return std::acosh(std::max(1.0, c));
    }
    default: {
      const double dot = x.coords.dot(y.coords);
      if (dot > 0.5) {
        // chord relation, accurate near coincident points
        const double chord = (x.coords - y.coords).norm();
        return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
      }
      return std::acos(std::max(-1.0, std::min(1.0, dot)));
    }
  }
}

double sn_power_integral(int kappa, int n, double U) {
  if (U < 0.0) throw std::domain_error("sn_power_integral: negative upper limit");
  if (n < 0) throw std::domain_error("sn_power_integral: negative power");
  if (U == 0.0) return 0.0;
  if (kappa == 0) return std::pow(U, n + 1) / (n + 1);
  if (n == 0) return U;
  if (kappa == -1) {
    const double sh2 = std::sinh(0.5 * U);
    if (n == 1) return 2.0 * sh2 * sh2;
    if (n == 2) {
      if (U < 0.01) {
        const double u2 = U * U;
        return U * u2 * (1.0 / 3.0 + u2 * (1.0 / 15.0 + u2 * (2.0 / 315.0)));
      }
      return 0.5 * (std::sinh(U) * std::cosh(U) - U);
    }
    if (n == 3) {
      const double cm1 = 2.0 * sh2 * sh2;  // cosh U - 1, no cancellation
      return cm1 * cm1 * (cm1 + 3.0) / 3.0;
    }
  } else {
    const double si2 = std::sin(0.5 * U);
    if (n == 1) return 2.0 * si2 * si2;
    if (n == 2) {
      if (U < 0.01) {
        const double u2 = U * U;
        return U * u2 * (1.0 / 3.0 - u2 * (1.0 / 15.0 - u2 * (2.0 / 315.0)));
      }
      return 0.5 * (U - std::sin(U) * std::cos(U));
    }
    if (n == 3) {
      const double omc = 2.0 * si2 * si2;  // 1 - cos U
      return omc * omc * (3.0 - omc) / 3.0;
    }
  }
  // n >= 4: upward recurrence. Near 0 the recurrence cancels catastrophically,
  // so short intervals fall back to a single Kronrod panel (exact to machine
  // precision for these smooth integrands).
  if (U < 0.5) {
    return integrate([kappa, n](double u) { return std::pow(sn(kappa, u), n); }, 0.0, U,
                     QuadratureSpec{1e-14, 1e-300, 30});
  }
  double im2 = U;                                  // I_0
  double im1 = kappa == -1 ? std::cosh(U) - 1.0    // I_1
                           : 1.0 - std::cos(U);
  const double snU = sn(kappa, U);
  const double csU = cs(kappa, U);
  for (int j = 2; j <= n; ++j) {
    double cur;
    if (kappa == -1)
      cur = (std::pow(snU, j - 1) * csU - (j - 1) * im2) / j;
    else
      cur = (-std::pow(snU, j - 1) * csU + (j - 1) * im2) / j;
    im2 = im1;
    im1 = cur;
  }
  return im1;
}

double slice_radius(const SpaceSpec& space, double r, double s) {
  if (s < 0.0 || s > r) throw std::domain_error("slice_radius: requires 0 <= s <= r");
  switch (space.kappa) {
    case 0:
      return std::sqrt(std::max(0.0, (r - s) * (r + s)));
    case -1:
      return std::acosh(std::max(1.0, std::cosh(r) / std::cosh(s)));
    default: {
      if (r > 0.5 * kPi + kModelSlack)
        throw std::domain_error("slice_radius: spherical balls are capped at pi/2");
      const double ratio = std::cos(r) / std::cos(s);
      return std::acos(std::max(-1.0, std::min(1.0, ratio)));
    }
  }
}

double ball_volume_dim(int kappa, int j, double r) {
  if (j < 1) throw std::domain_error("ball_volume_dim: dimension must be >= 1");
  return omega(j) * sn_power_integral(kappa, j - 1, r);
}

double ball_volume(const SpaceSpec& space, double r, const QuadratureSpec& quad) {
  (void)quad;
  if (r <= 0.0) throw std::domain_error("ball_volume: radius must be positive");
  if (space.kappa > 0 && r > 0.5 * kPi + kModelSlack)
    throw std::domain_error("ball_volume: spherical balls are capped at pi/2");
  if (space.kappa == 0)
    return std::exp(0.5 * space.d * std::log(kPi) - std::lgamma(0.5 * space.d + 1.0)) *
           std::pow(r, space.d);
  return ball_volume_dim(space.kappa, space.d, std::min(r, space.max_radius()));
}

double slice_volume(const SpaceSpec& space, int j, double r, double s,
                    const QuadratureSpec& quad) {
  (void)quad;
  if (j < 0 || j > space.d) throw std::domain_error("slice_volume: bad slice dimension");
  if (r <= 0.0) throw std::domain_error("slice_volume: radius must be positive");
  if (space.kappa > 0 && r > 0.5 * kPi + kModelSlack)
    throw std::domain_error("slice_volume: spherical balls are capped at pi/2");
  if (s > r) throw std::domain_error("slice_volume: flat distance exceeds the radius");
  if (j == 0) return s <= r ? 1.0 : 0.0;
  if (s == r) return 0.0;
  const double rho = slice_radius(space, r, s);
  return omega(j) * sn_power_integral(space.kappa, j - 1, rho);
}

}  // namespace kflat
