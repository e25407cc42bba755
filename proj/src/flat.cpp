#include "kflat/flat.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace kflat {

namespace {

constexpr double kFrameTol = 1e-10;
constexpr double kInputFrameTol = 1e-8;

double frame_orthonormality_defect(const Eigen::MatrixXd& F) {
  if (F.cols() == 0) return 0.0;
  Eigen::MatrixXd g = F.transpose() * F;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

// Columns k..n-1 of the Householder Q of an orthonormal n x k basis span the
// orthogonal complement.
Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& basis, int n) {
  if (basis.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - basis.cols());
}

Eigen::VectorXd pole(int d) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d + 1);
  p(d) = 1.0;
  return p;
}

}  // namespace

void validate_flat(const Flat& flat) {
  const auto& sp = flat.space;
  if (flat.k < 0 || flat.k > sp.d - 1)
    throw std::domain_error("Flat: k must satisfy 0 <= k <= d-1");
  if (sp.kappa > 0) {
    if (flat.frame.rows() != sp.d + 1 || flat.frame.cols() != flat.k + 1)
      throw std::domain_error("Flat: spherical frame must be (d+1) x (k+1)");
    if (frame_orthonormality_defect(flat.frame) > kFrameTol)
      throw std::domain_error("Flat: frame not orthonormal");
    return;
  }
  if (flat.foot.size() != sp.d) throw std::domain_error("Flat: foot must have length d");
  if (flat.frame.rows() != sp.d || flat.frame.cols() != flat.k)
    throw std::domain_error("Flat: frame must be d x k");
  if (frame_orthonormality_defect(flat.frame) > kFrameTol)
    throw std::domain_error("Flat: frame not orthonormal");
  if (flat.k > 0 && (flat.frame.transpose() * flat.foot).cwiseAbs().maxCoeff() > kFrameTol)
    throw std::domain_error("Flat: frame not orthogonal to foot");
  if (sp.kappa < 0 && flat.foot.norm() >= 1.0)
    throw std::domain_error("Flat: Beltrami-Klein foot outside the unit ball");
}

Flat flat_from_foot(const SpaceSpec& space, int k, const Eigen::VectorXd& u, double s,
                    const Eigen::MatrixXd& tangent_frame) {
  if (k < 0 || k > space.d - 1) throw std::domain_error("flat_from_foot: bad k");
  if (s < 0.0) throw std::domain_error("flat_from_foot: negative distance");
  if (space.kappa > 0 && s > 0.5 * 3.141592653589793 + 1e-12)
    throw std::domain_error("flat_from_foot: spherical foot distance exceeds pi/2");
  const int n = space.coord_dim();
  if (u.size() != n) throw std::invalid_argument("flat_from_foot: direction length mismatch");
  if (std::abs(u.norm() - 1.0) > kInputFrameTol)
    throw std::invalid_argument("flat_from_foot: direction not unit");
  if (tangent_frame.rows() != n || tangent_frame.cols() != k)
    throw std::invalid_argument("flat_from_foot: tangent frame shape mismatch");
  if (frame_orthonormality_defect(tangent_frame) > kInputFrameTol)
    throw std::invalid_argument("flat_from_foot: tangent frame not orthonormal");
  if (k > 0 && (tangent_frame.transpose() * u).cwiseAbs().maxCoeff() > kInputFrameTol)
    throw std::invalid_argument("flat_from_foot: tangent frame not orthogonal to direction");

  if (space.kappa > 0) {
    const Eigen::VectorXd p = pole(space.d);
    if (std::abs(u.dot(p)) > kInputFrameTol)
      throw std::invalid_argument("flat_from_foot: direction must be tangent at the pole");
    if (k > 0 && (tangent_frame.transpose() * p).cwiseAbs().maxCoeff() > kInputFrameTol)
      throw std::invalid_argument("flat_from_foot: tangent frame must be orthogonal to the pole");
    Eigen::MatrixXd span(n, k + 1);
    span.col(0) = std::cos(s) * p + std::sin(s) * u;
    if (k > 0) span.rightCols(k) = tangent_frame;
    return Flat{space, k, Eigen::VectorXd(), std::move(span)};
  }

  const double m = space.kappa == 0 ? s : std::tanh(s);
  return Flat{space, k, m * u, tangent_frame};
}

double flat_distance_to_origin(const Flat& flat) {
  if (flat.space.kappa > 0) {
    const Eigen::VectorXd proj = flat.frame.transpose() * pole(flat.space.d);
    return std::acos(std::max(-1.0, std::min(1.0, proj.norm())));
  }
  const double nf = flat.foot.norm();
  return flat.space.kappa == 0 ? nf : std::atanh(std::min(nf, 1.0 - 1e-16));
}

IntersectResult intersect_flats(const SpaceSpec& space, const std::vector<Flat>& flats,
                                double rank_tol) {
  if (flats.size() < 2) throw std::invalid_argument("intersect_flats: need at least two flats");
  const int k = flats.front().k;
  for (const auto& f : flats) {
    if (!(f.space == space) || f.k != k)
      throw std::invalid_argument("intersect_flats: flats disagree in space or k");
  }
  const int m = static_cast<int>(flats.size());
  const int expected = space.d - m * (space.d - k);
  return intersect_stack(space, flats, rank_tol, expected);
}

IntersectResult intersect_stack(const SpaceSpec& space, const std::vector<Flat>& flats,
                                double rank_tol, int expected_dim) {
  const int d = space.d;
  if (space.kappa > 0) {
    const int n = d + 1;
    int rows = 0;
    for (const auto& f : flats) rows += n - (f.k + 1);
    Eigen::MatrixXd M(rows, n);
    int at = 0;
    for (const auto& f : flats) {
      const Eigen::MatrixXd comp = orthonormal_complement(f.frame, n);
      M.middleRows(at, comp.cols()) = comp.transpose();
      at += static_cast<int>(comp.cols());
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sig = svd.singularValues();
    const double smax = sig.size() ? sig(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sig.size(); ++i)
      if (sig(i) > rank_tol * smax) ++rank;
    const int null_dim = n - rank;
    const int dim_sph = null_dim - 1;
    if (dim_sph != expected_dim) return IntersectResult{IntersectKind::Degenerate, dim_sph, {}};
    Flat out{space, dim_sph, Eigen::VectorXd(), svd.matrixV().rightCols(null_dim)};
    return IntersectResult{IntersectKind::Proper, dim_sph, std::move(out)};
  }

  int rows = 0;
  for (const auto& f : flats) rows += d - f.k;
  Eigen::MatrixXd M(rows, d);
  Eigen::VectorXd c(rows);
  int at = 0;
  for (const auto& f : flats) {
    const Eigen::MatrixXd comp = orthonormal_complement(f.frame, d);
    const int nr = static_cast<int>(comp.cols());
    M.middleRows(at, nr) = comp.transpose();
    c.segment(at, nr) = comp.transpose() * f.foot;
    at += nr;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sig = svd.singularValues();
  const double smax = sig(0);
  int rank = 0;
  for (int i = 0; i < sig.size(); ++i)
    if (sig(i) > rank_tol * smax) ++rank;

  // Min-norm least-squares solution = Euclidean foot of the intersection flat.
  Eigen::VectorXd ut_c = svd.matrixU().transpose() * c;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < rank; ++i) x0 += (ut_c(i) / sig(i)) * svd.matrixV().col(i);

  const double residual = (M * x0 - c).norm();
  const bool feasible = residual <= rank_tol * smax * (1.0 + c.norm());
  if (!feasible) {
    if (space.kappa < 0) return IntersectResult{IntersectKind::Empty, -1, {}};
    return IntersectResult{IntersectKind::Degenerate, -1, {}};
  }
  const int dim = d - rank;
  if (dim != expected_dim) return IntersectResult{IntersectKind::Degenerate, dim, {}};
  if (space.kappa < 0 && x0.norm() >= 1.0 - 1e-13)
    return IntersectResult{IntersectKind::Empty, -1, {}};
  Flat out{space, dim, std::move(x0), svd.matrixV().rightCols(dim)};
  return IntersectResult{IntersectKind::Proper, dim, std::move(out)};
}

double bk_volume_density(const Flat& flat, const Point& x) {
  if (flat.space.kappa != -1)
    throw std::domain_error("bk_volume_density: defined for kappa=-1 only");
  const double nx2 = x.coords.squaredNorm();
  if (nx2 >= 1.0) throw std::domain_error("bk_volume_density: point outside the unit ball");
  const Eigen::VectorXd y = x.coords - flat.foot;
  const Eigen::VectorXd off = y - flat.frame * (flat.frame.transpose() * y);
  if (off.norm() > 1e-10 * (1.0 + x.coords.norm()))
    throw std::domain_error("bk_volume_density: point not on the flat");
  const double t2 = flat.foot.squaredNorm();
  return std::sqrt(1.0 - t2) * std::pow(1.0 - nx2, -0.5 * (flat.k + 1));
}

double bk_flat_measure_density(const Flat& flat) {
  if (flat.space.kappa != -1)
    throw std::domain_error("bk_flat_measure_density: defined for kappa=-1 only");
  const double t2 = flat.foot.squaredNorm();
  return std::pow(1.0 - t2, -0.5 * (flat.space.d + 1));
}

Point flat_point(const Flat& flat, const Eigen::VectorXd& w, double rho) {
  const auto& sp = flat.space;
  if (w.size() != flat.k) throw std::invalid_argument("flat_point: direction length mismatch");
  if (sp.kappa <= 0) {
    const Eigen::VectorXd dir = flat.frame * w;
    if (sp.kappa == 0) return Point{flat.foot + rho * dir};
    const double scale = std::sqrt(1.0 - flat.foot.squaredNorm());
    return Point{flat.foot + scale * std::tanh(rho) * dir};
  }
  // Spherical: walk inside the great subsphere from its point nearest the pole.
  Eigen::VectorXd qc = flat.frame.transpose() * pole(sp.d);
  if (qc.norm() < 1e-14) {
    qc = Eigen::VectorXd::Zero(flat.k + 1);
    qc(0) = 1.0;
  } else {
    qc.normalize();
  }
  const Eigen::MatrixXd tang = orthonormal_complement(qc, flat.k + 1);
  const Eigen::VectorXd zc = std::cos(rho) * qc + std::sin(rho) * (tang * w);
  return Point{flat.frame * zc};
}

}  // namespace kflat
