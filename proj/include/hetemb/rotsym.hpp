#pragma once

#include <stdexcept>

// Rotationally symmetric metric dr^2 + phi(r)^2 g_{S^2} on R^3 with warping
// function phi_alpha(r) = alpha * atan(r / alpha). All curvature functions are
// for the unscaled metric; a factor with scale lambda divides them by lambda^2.
namespace hetemb::rotsym {

double warp(double alpha, double r);

/// Scalar curvature R_alpha(r) = 2(-2 phi''/phi + (1 - phi'^2)/phi^2).
/// Even in r; R_alpha(0) = 12/alpha^2.
double curvature(double alpha, double r);

/// dR_alpha/dr, nonpositive for r >= 0.
double curvature_derivative(double alpha, double r);

/// Lower bound 8/(pi^2 alpha^2) approached as r -> infinity.
double curvature_asymptote(double alpha);

struct Sectional {
  double K;  // planes containing the radial direction: -phi''/phi
  double L;  // planes tangent to the orbit spheres: (1 - phi'^2)/phi^2
};

Sectional sectional(double alpha, double r);

/// Smallest r >= 0 with R_alpha(r) = value, by bisection on the monotone
/// profile. Values above 12/alpha^2 map to 0; values at or below the asymptote
/// throw std::domain_error.
double inverse_curvature(double alpha, double value);

struct AlphaChoice {
  double alpha;
  double delta_hat;
};

/// Picks alpha so that R_alpha(0) = maxF - minF + delta + ell_plus and the
/// shift delta_hat = 2/(3 pi^2 - 2) (maxF - minF + ell_plus) + delta.
AlphaChoice alpha_from_range(double max_forman, double min_forman, double delta,
                             double ell_plus);

/// Volume of the annular region of radius rho around a point with radial
/// coordinate center_r in H^3 x R (only hyperbolic_dim == 3 is supported).
double annular_volume(double alpha, int hyperbolic_dim, double center_r, double rho);

}  // namespace hetemb::rotsym
