#pragma once

#include <functional>
#include <stdexcept>

namespace kflat {

/// Tolerances and subdivision limit for all adaptive quadrature in the library.
struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_subdivisions = 60;

  void validate() const {
    if (rel_tol <= 0.0 || abs_tol <= 0.0)
      throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
  }
};

/// Adaptive Gauss-Kronrod (15-point) integration of f over [a, b].
/// Bisects until the per-interval Kronrod error estimate meets the tolerance;
/// max_subdivisions bounds the recursion depth per branch.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& quad = {});

/// Integrate f over [a, infinity) for integrands with eventually exponential
/// decay: panels [a, a+L], [a+L, a+2L], ... are accumulated until a panel
/// contributes less than the tolerance.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureSpec& quad = {}, double panel = 4.0);

/// Tanh-sinh (double exponential) rule on (a, b); handles integrable endpoint
/// singularities that defeat the Gauss-Kronrod rule.
double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& quad = {});

/// Tanh-sinh with endpoint offsets: the integrand receives (x, x-a, b-x) with
/// the distances computed in full precision, so singular factors at the
/// endpoints can be evaluated without cancellation.
double integrate_tanh_sinh_offset(const std::function<double(double, double, double)>& f,
                                  double a, double b, const QuadratureSpec& quad = {});

}  // namespace kflat
