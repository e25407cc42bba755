#include <doctest.h>

#include <cmath>

#include "kflat/rng.hpp"
#include "kflat/stats.hpp"

using namespace kflat;

TEST_SUITE_BEGIN("stats");

TEST_CASE("Kolmogorov distance to the standard normal") {
  RngStream rng(1, 0);
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.normal();
  CHECK(ks_distance(xs) < 0.006);

  std::vector<double> constant(200, 0.0);
  CHECK(ks_distance(constant) == doctest::Approx(0.5).epsilon(1e-6));

  for (auto& x : xs) x += 5.0;
  CHECK(ks_distance(xs) > 0.9);

  std::vector<double> few(50, 0.0);
  CHECK_THROWS_AS(ks_distance(few), std::invalid_argument);
}

TEST_CASE("k-statistics on normal data with shift and scale laws") {
  RngStream rng(2, 0);
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.normal();
  auto base = empirical_cumulants(xs, 4);
  CHECK(std::abs(base[0].value) <= 3.0 * base[0].std_error);
  CHECK(base[1].value == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(base[2].value) <= 3.0 * base[2].std_error);
  CHECK(std::abs(base[3].value) <= 3.0 * base[3].std_error);

  std::vector<double> shifted(xs);
  for (auto& x : shifted) x += 2.5;
  auto sh = empirical_cumulants(shifted, 4);
  CHECK(sh[0].value == doctest::Approx(base[0].value + 2.5).epsilon(1e-12));
  CHECK(sh[1].value == doctest::Approx(base[1].value).epsilon(1e-9));
  CHECK(std::abs(sh[2].value - base[2].value) <= 1e-9);

  std::vector<double> scaled(xs);
  for (auto& x : scaled) x *= 3.0;
  auto sc = empirical_cumulants(scaled, 4);
  CHECK(sc[1].value == doctest::Approx(9.0 * base[1].value).epsilon(1e-9));
  CHECK(sc[2].value == doctest::Approx(27.0 * base[2].value).epsilon(1e-6));

  std::vector<double> degenerate(100, 1.0);
  CHECK_THROWS_AS(empirical_cumulants(degenerate, 2), std::runtime_error);
}

TEST_CASE("empirical characteristic function") {
  RngStream rng(3, 0);
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.normal();
  const std::vector<double> grid = {0.0, 1.0, -1.0};
  const auto cf = empirical_cf(xs, grid);
  CHECK(cf[0] == std::complex<double>(1.0, 0.0));
  const double band = 3.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(cf[1].real() - std::exp(-0.5)) < band);
  CHECK(std::abs(cf[1].imag()) < band);
  CHECK(std::abs(cf[2] - std::conj(cf[1])) < 1e-12);
  for (const auto& v : cf) CHECK(std::abs(v) <= 1.0 + 1e-12);
}

TEST_CASE("bootstrap standard error of the variance") {
  RngStream rng(4, 0);
  const int n = 4000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.normal();
  RngStream boot(4, 1);
  const double se = bootstrap_variance_se(xs, 400, boot);
  // asymptotic SE of the sample variance of a normal is sqrt(2/(n-1))
  const double asym = std::sqrt(2.0 / (n - 1.0));
  CHECK(se == doctest::Approx(asym).epsilon(0.25));
}

TEST_SUITE_END();
