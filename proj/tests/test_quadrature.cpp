#include <doctest.h>

#include <cmath>

#include "kflat/quadrature.hpp"

using namespace kflat;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("polynomials are exact") {
  auto f = [](double x) { return 3.0 * x * x - 2.0 * x + 1.0; };
  CHECK(integrate(f, 0.0, 2.0) == doctest::Approx(8.0 - 4.0 + 2.0).epsilon(1e-14));
}

TEST_CASE("smooth transcendental integrand") {
  const double got = integrate([](double x) { return std::exp(-x * x); }, 0.0, 10.0);
  CHECK(got == doctest::Approx(0.5 * std::sqrt(3.141592653589793)).epsilon(1e-12));
}

TEST_CASE("oscillatory integrand meets tolerance") {
  const double got = integrate([](double x) { return std::cos(20.0 * x); }, 0.0, 3.0);
  CHECK(got == doctest::Approx(std::sin(60.0) / 20.0).epsilon(1e-10));
}

TEST_CASE("half-infinite range with exponential decay") {
  const double got = integrate_to_infinity([](double x) { return std::exp(-2.0 * x); }, 0.0);
  CHECK(got == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("tanh-sinh handles endpoint singularities") {
  const double got = integrate_tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(got == doctest::Approx(2.0).epsilon(1e-12));
  // offsets keep singular factors at both endpoints in full precision
  const double beta = integrate_tanh_sinh_offset(
      [](double, double da, double db) { return std::pow(da, -0.5) * std::pow(db, -0.5); },
      0.0, 1.0);
  CHECK(beta == doctest::Approx(3.141592653589793).epsilon(1e-12));
}

TEST_CASE("bad tolerances are rejected") {
  QuadratureSpec q;
  q.rel_tol = -1.0;
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, q), std::invalid_argument);
}

TEST_SUITE_END();
