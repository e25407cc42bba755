#include "kflat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kflat {

namespace {

// 15-point Kronrod nodes/weights on [-1,1] plus the embedded 7-point Gauss weights.
// Values from the QUADPACK QK15 tables.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double value;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double result_gauss = fc * kWg[3];
  double result_kronrod = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    result_kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = result_kronrod * h;
  const double err = std::abs((result_kronrod - result_gauss) * h);
  return {value, err};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             const QuadratureSpec& quad, double tol_scale, int depth) {
  const PanelResult r = gk15(f, a, b);
  const double tol = std::max(quad.abs_tol, quad.rel_tol * std::max(tol_scale, std::abs(r.value)));
  if (r.error <= tol || depth >= quad.max_subdivisions || (b - a) < 1e-15 * (1.0 + std::abs(a)))
    return r.value;
  const double c = 0.5 * (a + b);
  // Children inherit a tolerance share proportional to their estimated mass.
  return adapt(f, a, c, quad, 0.5 * tol_scale, depth + 1) +
         adapt(f, c, b, quad, 0.5 * tol_scale, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& quad) {
  quad.validate();
  if (!(b >= a)) throw std::invalid_argument("integrate: requires b >= a");
  if (a == b) return 0.0;
  const PanelResult first = gk15(f, a, b);
  const double scale = std::abs(first.value);
  if (first.error <= std::max(quad.abs_tol, quad.rel_tol * scale)) return first.value;
  const double c = 0.5 * (a + b);
  return adapt(f, a, c, quad, 0.5 * scale, 1) + adapt(f, c, b, quad, 0.5 * scale, 1);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureSpec& quad, double panel) {
  quad.validate();
  double total = 0.0;
  double lo = a;
  for (int i = 0; i < 400; ++i) {
    const double hi = lo + panel;
    const double piece = integrate(f, lo, hi, quad);
    total += piece;
    if (i >= 1 && std::abs(piece) <= std::max(quad.abs_tol, 0.5 * quad.rel_tol * std::abs(total)))
      return total;
    lo = hi;
  }
  throw std::runtime_error("integrate_to_infinity: integrand did not decay");
}

double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& quad) {
  return integrate_tanh_sinh_offset(
      [&f](double x, double, double) { return f(x); }, a, b, quad);
}

double integrate_tanh_sinh_offset(const std::function<double(double, double, double)>& f,
                                  double a, double b, const QuadratureSpec& quad) {
  quad.validate();
  if (!(b > a)) throw std::invalid_argument("integrate_tanh_sinh: requires b > a");
  const double half = 0.5 * (b - a);
  // x(t) = mid + half*tanh((pi/2) sinh t). Abscissae are handled as offsets
  // from the nearer endpoint so the double-exponential tail is not rounded
  // away near a and b.
  const double tmax = 6.5;
  auto term = [&](double t) -> double {
    const double u = 1.5707963267948966 * std::sinh(t);
    const double au = std::abs(u);
    // distance from the nearer endpoint: half * (1 - tanh|u|) = half * 2/(1+e^{2|u|})
    const double delta = au > 350.0 ? 0.0 : half * 2.0 / (1.0 + std::exp(2.0 * au));
    if (delta <= 0.0) return 0.0;
    const double ch = std::cosh(u);
    const double w = half * 1.5707963267948966 * std::cosh(t) / (ch * ch);
    if (!(w > 0.0)) return 0.0;
    const double width = b - a;
    const double x = u >= 0.0 ? b - delta : a + delta;
    const double da = u >= 0.0 ? width - delta : delta;
    const double db = u >= 0.0 ? delta : width - delta;
    return f(x, da, db) * w;
  };
  double h = 1.0;
  double prev = term(0.0);
  for (double t = h; t <= tmax; t += h) prev += term(t) + term(-t);
  prev *= h;
  for (int level = 1; level <= 12; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (double t = h; t <= tmax; t += 2.0 * h) add += term(t) + term(-t);
    const double cur = 0.5 * prev + add * h;
    if (level >= 3 &&
        std::abs(cur - prev) <= std::max(quad.abs_tol, quad.rel_tol * std::abs(cur)))
      return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace kflat
