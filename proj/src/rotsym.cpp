#include "hetemb/rotsym.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace hetemb::rotsym {

namespace {

constexpr double kPi = std::numbers::pi;
// Below this r/alpha the closed forms are 0/0-prone and a Taylor expansion is used.
constexpr double kSeriesCutoff = 1e-3;
constexpr double kFarField = 1e150;

struct Profile {
  double K, L, dK, dL;
};

// Unit-alpha profile at u > 0.
Profile unit_profile(double u) {
  if (u > kFarField) {
    double a = std::atan(u);
    return {0.0, 1.0 / (a * a), 0.0, 0.0};
  }
  const double a = std::atan(u);
  const double s = 1.0 + u * u;
  const double K = 2.0 * u / (s * s * a);
  const double L = u * u * (2.0 + u * u) / (s * s * a * a);
  const double dK = K * ((1.0 - 3.0 * u * u) / (u * s) - 1.0 / (s * a));
  const double dL = L * (4.0 / (u * s * (2.0 + u * u)) - 2.0 / (s * a));
  return {K, L, dK, dL};
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("rotsym: alpha must be positive");
}

}  // namespace

double warp(double alpha, double r) {
  check_alpha(alpha);
  return alpha * std::atan(r / alpha);
}

double curvature(double alpha, double r) {
  check_alpha(alpha);
  const double u = std::abs(r) / alpha;
  double unit;
  if (u < kSeriesCutoff) {
    const double u2 = u * u;
    unit = 12.0 - 50.0 / 3.0 * u2 + 976.0 / 45.0 * u2 * u2;
  } else {
    Profile p = unit_profile(u);
    unit = 2.0 * (2.0 * p.K + p.L);
  }
  return unit / (alpha * alpha);
}

double curvature_derivative(double alpha, double r) {
  check_alpha(alpha);
  const double u = std::abs(r) / alpha;
  double unit;
  if (u < kSeriesCutoff) {
    const double u2 = u * u;
    unit = u * (-100.0 / 3.0 + u2 * (3904.0 / 45.0 - 16592.0 / 105.0 * u2));
  } else {
    Profile p = unit_profile(u);
    unit = 2.0 * (2.0 * p.dK + p.dL);
  }
  const double sign = r < 0.0 ? -1.0 : 1.0;
  return sign * unit / (alpha * alpha * alpha);
}

double curvature_asymptote(double alpha) {
  check_alpha(alpha);
  return 8.0 / (kPi * kPi * alpha * alpha);
}

Sectional sectional(double alpha, double r) {
  check_alpha(alpha);
  const double u = std::abs(r) / alpha;
  const double a2 = alpha * alpha;
  if (u < kSeriesCutoff) {
    const double u2 = u * u;
    return {(2.0 - 10.0 / 3.0 * u2 + 202.0 / 45.0 * u2 * u2) / a2,
            (2.0 - 5.0 / 3.0 * u2 + 28.0 / 15.0 * u2 * u2) / a2};
  }
  Profile p = unit_profile(u);
  return {p.K / a2, p.L / a2};
}

double inverse_curvature(double alpha, double value) {
  check_alpha(alpha);
  if (value >= 12.0 / (alpha * alpha)) return 0.0;
  if (value <= curvature_asymptote(alpha)) {
    throw std::domain_error("inverse_curvature: value " + std::to_string(value) +
                            " is not attained (asymptote " +
                            std::to_string(curvature_asymptote(alpha)) + ")");
  }
  double lo = 0.0;
  double hi = alpha;
  while (curvature(alpha, hi) > value) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (curvature(alpha, mid) > value) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

AlphaChoice alpha_from_range(double max_forman, double min_forman, double delta,
                             double ell_plus) {
  if (!(delta > 0.0) || !(ell_plus > 0.0)) {
    throw std::domain_error("alpha_from_range: delta and ell_plus must be positive");
  }
  if (max_forman < min_forman) {
    throw std::domain_error("alpha_from_range: max Forman below min Forman");
  }
  const double span = max_forman - min_forman;
  const double top = span + delta + ell_plus;
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw std::domain_error("alpha_from_range: curvature range must be positive and finite");
  }
  AlphaChoice c;
  c.alpha = std::sqrt(12.0 / top);
  c.delta_hat = 2.0 / (3.0 * kPi * kPi - 2.0) * (span + ell_plus) + delta;
  return c;
}

namespace {

// integral_0^a sinh^2(z) dz
double sinh2_integral(double a) {
  if (a < 1e-3) {
    const double a2 = a * a;
    return a * a2 * (1.0 / 3.0 + a2 / 15.0);
  }
  return 0.5 * (0.5 * std::sinh(2.0 * a) - a);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double eps, double floor, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(eps, floor)) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, floor, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, floor, depth - 1);
}

}  // namespace

double annular_volume(double alpha, int hyperbolic_dim, double center_r, double rho) {
  check_alpha(alpha);
  if (hyperbolic_dim != 3) {
    throw std::domain_error("annular_volume: only the H^3 homogeneous factor is supported");
  }
  if (!(rho > 0.0)) throw std::domain_error("annular_volume: rho must be positive");
  if (center_r < 0.0) throw std::domain_error("annular_volume: center_r must be nonnegative");

  // r = center_r + rho sin(theta) removes the square-root endpoint behaviour of
  // the inner radius sqrt(rho^2 - (r - center_r)^2) = rho cos(theta).
  const double theta_lo = center_r >= rho ? -kPi / 2.0 : std::asin(-center_r / rho);
  const double theta_hi = kPi / 2.0;
  auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    const double r = center_r + rho * std::sin(theta);
    const double phi = warp(alpha, std::max(r, 0.0));
    return sinh2_integral(rho * std::max(c, 0.0)) * phi * phi * rho * c;
  };
  const double fa = integrand(theta_lo);
  const double fb = integrand(theta_hi);
  const double fm = integrand(0.5 * (theta_lo + theta_hi));
  const double whole = (theta_hi - theta_lo) / 6.0 * (fa + 4.0 * fm + fb);
  // Large volumes: 1e-8 absolute is below double resolution, so the panel
  // tolerance is floored relative to a coarse estimate of the whole integral.
  double coarse = 0.0;
  const int panels = 64;
  const double hstep = (theta_hi - theta_lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double x = theta_lo + k * hstep;
    coarse += hstep / 6.0 * (integrand(x) + 4.0 * integrand(x + 0.5 * hstep) + integrand(x + hstep));
  }
  const double omega2 = 4.0 * kPi;
  return omega2 * omega2 *
         adaptive_simpson(integrand, theta_lo, theta_hi, fa, fm, fb, whole, 1e-8, 1e-13 * std::abs(coarse), 50);
}

}  // namespace hetemb::rotsym
