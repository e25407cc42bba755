#pragma once

#include <memory>
#include <vector>

#include "kflat/flat.hpp"
#include "kflat/measures.hpp"
#include "kflat/rng.hpp"

namespace kflat {

/// Haar-distributed orthonormal frame: ambient_dim x sub_dim, from a Gaussian
/// matrix via sign-fixed Householder QR.
Eigen::MatrixXd haar_subspace(int ambient_dim, int sub_dim, RngStream& rng);

/// Uniform unit vector in R^dim.
Eigen::VectorXd uniform_direction(int dim, RngStream& rng);

/// Inverse-CDF sampler for a density proportional to cs(s)^a sn(s)^b on an
/// interval [lo, hi], with an overall prefactor so total_mass() is the actual
/// measure. Cumulative values are cached on 1024 Chebyshev-spaced knots; draws
/// bisect the monotone cubic Hermite interpolant to 1e-12.
class RadialSampler {
 public:
  RadialSampler(int kappa, int a, int b, double lo, double hi, double prefactor,
                const QuadratureSpec& quad = {});

  double total_mass() const { return total_; }
  double density(double s) const;
  double cdf(double s) const;          // mass of [lo, s]
  double quantile(double q) const;     // inverse of cdf/total, q in [0,1]
  double draw(RngStream& rng) const { return quantile(rng.uniform()); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  int kappa_, a_, b_;
  double lo_, hi_, prefactor_, total_;
  std::vector<double> knots_, cum_, dens_;
};

/// Shared, cached sampler for the flat-distance density of (space, k) on
/// [0, r] (the pushforward of the invariant flat measure).
std::shared_ptr<const RadialSampler> flat_distance_sampler(const SpaceSpec& space, int k,
                                                           double r,
                                                           const QuadratureSpec& quad = {});

/// Draw one flat distance on [0, r] from the invariant-measure pushforward.
double sample_radial(const SpaceSpec& space, int k, double r, RngStream& rng,
                     const QuadratureSpec& quad = {});

/// Draw one invariant-measure-distributed k-flat hitting the ball of radius r.
Flat sample_flat(const SpaceSpec& space, int k, double r, RngStream& rng,
                 const QuadratureSpec& quad = {});

/// One realization of the Poisson k-flat process in the ball of radius r.
struct FlatProcessSample {
  SpaceSpec space;
  int k;
  double t;
  double r;
  std::vector<Flat> flats;
  std::uint64_t seed;
  std::uint64_t stream_id;
  std::int64_t degenerate_count = 0;
};

FlatProcessSample sample_process(const SpaceSpec& space, int k, double t, double r,
                                 RngStream& rng, const QuadratureSpec& quad = {},
                                 double expected_count_cap = 1e6);

/// Uniform point (w.r.t. the curved volume measure) in the ball of radius r.
Point sample_point_in_ball(const SpaceSpec& space, double r, RngStream& rng,
                           const QuadratureSpec& quad = {});

/// Realization of the inhomogeneous Poisson process on [0, T] with intensity
/// omega_{d-k} cosh^k s sinh^{d-k-1} s, sorted ascending.
std::vector<double> sample_zeta(int d, int k, double T, RngStream& rng,
                                const QuadratureSpec& quad = {},
                                double expected_count_cap = 1e6);

}  // namespace kflat
