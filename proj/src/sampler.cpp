#include "kflat/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace kflat {

namespace {
constexpr int kKnots = 1024;
constexpr double kPi = 3.141592653589793238462643383279502884;
}  // namespace

Eigen::MatrixXd haar_subspace(int ambient_dim, int sub_dim, RngStream& rng) {
  if (sub_dim < 1 || sub_dim > ambient_dim)
    throw std::domain_error("haar_subspace: requires 1 <= sub_dim <= ambient_dim");
  Eigen::MatrixXd g(ambient_dim, sub_dim);
  for (int j = 0; j < sub_dim; ++j)
    for (int i = 0; i < ambient_dim; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ambient_dim, sub_dim);
  const auto& r = qr.matrixQR();
  for (int j = 0; j < sub_dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::VectorXd uniform_direction(int dim, RngStream& rng) {
  Eigen::VectorXd v(dim);
  double n2;
  do {
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
    n2 = v.squaredNorm();
  } while (n2 < 1e-24);
  return v / std::sqrt(n2);
}

RadialSampler::RadialSampler(int kappa, int a, int b, double lo, double hi, double prefactor,
                             const QuadratureSpec& quad)
    : kappa_(kappa), a_(a), b_(b), lo_(lo), hi_(hi), prefactor_(prefactor) {
  if (!(hi > lo) || lo < 0.0) throw std::domain_error("RadialSampler: bad interval");
  knots_.resize(kKnots + 1);
  cum_.resize(kKnots + 1);
  dens_.resize(kKnots + 1);
  for (int j = 0; j <= kKnots; ++j) {
    const double c = 0.5 * (1.0 - std::cos(kPi * j / kKnots));
    knots_[j] = lo + (hi - lo) * c;
    dens_[j] = density(knots_[j]);
  }
  knots_.front() = lo;
  knots_.back() = hi;
  cum_[0] = 0.0;
  QuadratureSpec panel_quad{1e-13, 1e-300, 24};
  for (int j = 1; j <= kKnots; ++j) {
    cum_[j] = cum_[j - 1] + integrate([this](double s) { return density(s); }, knots_[j - 1],
                                      knots_[j], panel_quad);
  }
  total_ = cum_.back();
  if (!(total_ > 0.0)) throw std::domain_error("RadialSampler: zero total mass");
}

double RadialSampler::density(double s) const {
  return prefactor_ * std::pow(cs(kappa_, s), a_) * std::pow(sn(kappa_, s), b_);
}

namespace {
// Monotone cubic Hermite on one panel with Fritsch-Carlson derivative caps.
double hermite_cdf(double s0, double s1, double c0, double c1, double d0, double d1, double s) {
  const double h = s1 - s0;
  const double delta = (c1 - c0) / h;
  const double m0 = std::min(d0, 3.0 * delta);
  const double m1 = std::min(d1, 3.0 * delta);
  const double t = (s - s0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return c0 * (2 * t3 - 3 * t2 + 1) + h * m0 * (t3 - 2 * t2 + t) + c1 * (-2 * t3 + 3 * t2) +
         h * m1 * (t3 - t2);
}
}  // namespace

double RadialSampler::cdf(double s) const {
  if (s <= lo_) return 0.0;
  if (s >= hi_) return total_;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  const int j = static_cast<int>(it - knots_.begin()) - 1;
  return hermite_cdf(knots_[j], knots_[j + 1], cum_[j], cum_[j + 1], dens_[j], dens_[j + 1], s);
}

double RadialSampler::quantile(double q) const {
  const double target = std::min(1.0, std::max(0.0, q)) * total_;
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  int j = static_cast<int>(it - cum_.begin()) - 1;
  j = std::max(0, std::min(j, kKnots - 1));
  double a = knots_[j], b = knots_[j + 1];
  const double tol = 1e-12 * std::max(1.0, hi_);
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (hermite_cdf(knots_[j], knots_[j + 1], cum_[j], cum_[j + 1], dens_[j], dens_[j + 1],
                    mid) < target)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

namespace {

struct SamplerKey {
  int kappa, a, b;
  std::uint64_t lo_bits, hi_bits;
  bool operator<(const SamplerKey& o) const {
    return std::tie(kappa, a, b, lo_bits, hi_bits) <
           std::tie(o.kappa, o.a, o.b, o.lo_bits, o.hi_bits);
  }
};

std::uint64_t bits_of(double x) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(x));
  std::memcpy(&u, &x, sizeof(u));
  return u;
}

std::map<SamplerKey, std::shared_ptr<const RadialSampler>> g_cache;
std::mutex g_cache_mutex;

std::shared_ptr<const RadialSampler> cached_sampler(int kappa, int a, int b, double lo,
                                                    double hi, double prefactor,
                                                    const QuadratureSpec& quad) {
  const SamplerKey key{kappa, a, b, bits_of(lo), bits_of(hi)};
  // Per-thread memo of the last hit keeps hot sampling loops off the mutex.
  thread_local SamplerKey last_key{0, 0, 0, 0, 0};
  thread_local std::shared_ptr<const RadialSampler> last_value;
  if (last_value && !(key < last_key) && !(last_key < key)) return last_value;
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) {
      last_key = key;
      last_value = it->second;
      return last_value;
    }
  }
  auto made = std::make_shared<const RadialSampler>(kappa, a, b, lo, hi, prefactor, quad);
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto [it, inserted] = g_cache.emplace(key, std::move(made));
  last_key = key;
  last_value = it->second;
  return last_value;
}

}  // namespace

std::shared_ptr<const RadialSampler> flat_distance_sampler(const SpaceSpec& space, int k,
                                                           double r,
                                                           const QuadratureSpec& quad) {
  if (k < 0 || k > space.d - 1) throw std::domain_error("flat_distance_sampler: bad k");
  if (r <= 0.0) throw std::domain_error("flat_distance_sampler: bad radius");
  if (space.kappa > 0 && r > 0.5 * kPi + 1e-12)
    throw std::domain_error("flat_distance_sampler: spherical balls are capped at pi/2");
  return cached_sampler(space.kappa, k, space.d - k - 1, 0.0, r, omega(space.d - k), quad);
}

double sample_radial(const SpaceSpec& space, int k, double r, RngStream& rng,
                     const QuadratureSpec& quad) {
  return flat_distance_sampler(space, k, r, quad)->draw(rng);
}

Flat sample_flat(const SpaceSpec& space, int k, double r, RngStream& rng,
                 const QuadratureSpec& quad) {
  const double s = sample_radial(space, k, r, rng, quad);
  const int n = space.coord_dim();
  if (space.kappa <= 0) {
    const Eigen::VectorXd u = uniform_direction(n, rng);
    Eigen::MatrixXd v(n, k);
    if (k > 0) {
      Eigen::MatrixXd g(n, k);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
      g -= u * (u.transpose() * g);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      v = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
      const auto& rr = qr.matrixQR();
      for (int j = 0; j < k; ++j)
        if (rr(j, j) < 0.0) v.col(j) = -v.col(j);
    }
    return flat_from_foot(space, k, u, s, v);
  }
  // Sphere: direction tangent at the pole, frame orthogonal to pole and u.
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p(space.d) = 1.0;
  Eigen::VectorXd u(n);
  double nn;
  do {
    for (int i = 0; i < n; ++i) u(i) = rng.normal();
    u -= p * p.dot(u);
    nn = u.norm();
  } while (nn < 1e-12);
  u /= nn;
  Eigen::MatrixXd v(n, k);
  if (k > 0) {
    Eigen::MatrixXd g(n, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
    g -= p * (p.transpose() * g);
    g -= u * (u.transpose() * g);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    v = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    const auto& rr = qr.matrixQR();
    for (int j = 0; j < k; ++j)
      if (rr(j, j) < 0.0) v.col(j) = -v.col(j);
  }
  return flat_from_foot(space, k, u, s, v);
}

FlatProcessSample sample_process(const SpaceSpec& space, int k, double t, double r,
                                 RngStream& rng, const QuadratureSpec& quad,
                                 double expected_count_cap) {
  if (t <= 0.0) throw std::domain_error("sample_process: intensity must be positive");
  auto sampler = flat_distance_sampler(space, k, r, quad);
  const double expected = t * sampler->total_mass();
  if (expected > expected_count_cap)
    throw std::runtime_error("sample_process: expected flat count exceeds the resource cap");
  const std::int64_t n = rng.poisson(expected);
  FlatProcessSample out{space, k, t, r, {}, rng.seed(), rng.stream_id(), 0};
  out.flats.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) out.flats.push_back(sample_flat(space, k, r, rng, quad));
  return out;
}

Point sample_point_in_ball(const SpaceSpec& space, double r, RngStream& rng,
                           const QuadratureSpec& quad) {
  if (r <= 0.0) throw std::domain_error("sample_point_in_ball: bad radius");
  if (space.kappa > 0 && r > 0.5 * kPi + 1e-12)
    throw std::domain_error("sample_point_in_ball: spherical balls are capped at pi/2");
  auto sampler = cached_sampler(space.kappa, 0, space.d - 1, 0.0, r, 1.0, quad);
  const double s = sampler->draw(rng);
  if (space.kappa <= 0) {
    const Eigen::VectorXd u = uniform_direction(space.d, rng);
    const double m = space.kappa == 0 ? s : std::tanh(s);
    return Point{m * u};
  }
  const int n = space.d + 1;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p(space.d) = 1.0;
  Eigen::VectorXd u(n);
  double nn;
  do {
    for (int i = 0; i < n; ++i) u(i) = rng.normal();
    u -= p * p.dot(u);
    nn = u.norm();
  } while (nn < 1e-12);
  u /= nn;
  return Point{std::cos(s) * p + std::sin(s) * u};
}

std::vector<double> sample_zeta(int d, int k, double T, RngStream& rng,
                                const QuadratureSpec& quad, double expected_count_cap) {
  if (T <= 0.0) throw std::domain_error("sample_zeta: T must be positive");
  if (d < 2 || k < 0 || k > d - 1) throw std::domain_error("sample_zeta: bad (d, k)");
  auto sampler = cached_sampler(-1, k, d - k - 1, 0.0, T, omega(d - k), quad);
  const double expected = sampler->total_mass();
  if (expected > expected_count_cap)
    throw std::runtime_error("sample_zeta: expected point count exceeds the resource cap");
  const std::int64_t n = rng.poisson(expected);
  std::vector<double> pts(n);
  for (auto& s : pts) s = sampler->draw(rng);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace kflat
