#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "kflat/space.hpp"

namespace kflat {

/// A k-flat (totally geodesic k-submanifold) in model coordinates.
///
/// kappa in {0,-1}: the flat is the affine piece foot + span(frame), with
/// `foot` the Euclidean foot of the origin on the affine hull and `frame` a
/// d x k orthonormal matrix, each column orthogonal to foot. kappa=+1: the
/// flat is S^d intersected with a (k+1)-dimensional linear subspace; `frame`
/// is a (d+1) x (k+1) orthonormal spanning basis and `foot` is unused/empty.
struct Flat {
  SpaceSpec space;
  int k;
  Eigen::VectorXd foot;
  Eigen::MatrixXd frame;
};

/// Throws std::domain_error / std::invalid_argument when the frame fails
/// orthonormality (1e-10), foot-orthogonality (1e-10) or model constraints.
void validate_flat(const Flat& flat);

/// Constructs the k-flat orthogonal to the geodesic from the origin in unit
/// direction u at distance s. `tangent_frame` is an orthonormal k-frame
/// orthogonal to u (and to the pole for kappa=+1) giving the flat's
/// orientation. Frame validity is checked at 1e-8.
Flat flat_from_foot(const SpaceSpec& space, int k, const Eigen::VectorXd& u, double s,
                    const Eigen::MatrixXd& tangent_frame);

/// Geodesic distance from the flat to the origin.
double flat_distance_to_origin(const Flat& flat);

enum class IntersectKind { Proper, Empty, Degenerate };

/// Outcome of intersecting m >= 2 flats. Proper carries the intersection as a
/// Flat of the generic dimension d - m(d-k); Empty (kappa=-1 only) means the
/// affine hulls meet outside the unit ball or not at all; Degenerate flags a
/// non-generic configuration (dimension off the generic value), which callers
/// count and skip.
struct IntersectResult {
  IntersectKind kind = IntersectKind::Degenerate;
  int dim = -1;
  std::optional<Flat> flat;
};

IntersectResult intersect_flats(const SpaceSpec& space, const std::vector<Flat>& flats,
                                double rank_tol = 1e-8);

/// Core stacked-system solver behind intersect_flats. Accepts flats of mixed
/// dimension (the incremental evaluation path intersects a partial
/// intersection with the next k-flat) and an explicit generic target
/// dimension.
IntersectResult intersect_stack(const SpaceSpec& space, const std::vector<Flat>& flats,
                                double rank_tol, int expected_dim);

/// Density of the hyperbolic k-Hausdorff measure on a Beltrami-Klein flat with
/// respect to the Euclidean one, at a point x of the flat.
double bk_volume_density(const Flat& flat, const Point& x);

/// Density of the invariant flat measure in the Beltrami-Klein model with
/// respect to the Euclidean invariant flat measure, at this flat.
double bk_flat_measure_density(const Flat& flat);

/// Point of the flat at intrinsic geodesic distance rho from its foot point in
/// intrinsic unit direction w (a unit vector in R^k / R^{k} of frame
/// coefficients). Used for sampling on flats and in tests.
Point flat_point(const Flat& flat, const Eigen::VectorXd& w, double rho);

}  // namespace kflat
