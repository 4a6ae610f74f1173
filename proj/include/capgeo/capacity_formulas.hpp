// Closed-form p-capacities of balls and spherical shells, and the
// normalizations used throughout.
#pragma once

#include "capgeo/common.hpp"

#include <cmath>
#include <string>

namespace capgeo {

inline void check_p_range(int n, double p) {
  if (!(p > 1.0 && p < n)) throw InvalidArgument("p must lie in (1, n): p=" + std::to_string(p) + ", n=" + std::to_string(n));
}

/// ((p-1)/(n-p))^{1-p}
inline double capacity_constant(int n, double p) {
  check_p_range(n, p);
  return std::pow((p - 1.0) / (n - p), 1.0 - p);
}

/// cap_p of a radius-r ball: r^{n-p} ((p-1)/(n-p))^{1-p} sigma_{n-1}.
inline double ball_capacity(int n, double p, double r) {
  check_p_range(n, p);
  if (!(r > 0.0)) throw InvalidArgument("ball_capacity: radius must be positive");
  return std::pow(r, n - p) * capacity_constant(n, p) * unit_sphere_area(n);
}

/// p-capacity of the shell r < |x| < R (minimum of the radial p-Dirichlet energy).
inline double annulus_capacity(int n, double p, double r, double big_r) {
  check_p_range(n, p);
  if (!(r > 0.0) || !(r < big_r)) throw InvalidArgument("annulus_capacity: need 0 < r < R");
  const double e = (p - n) / (p - 1.0);
  return capacity_constant(n, p) * unit_sphere_area(n) * std::pow(std::pow(r, e) - std::pow(big_r, e), 1.0 - p);
}

/// cap_p / (((p-1)/(n-p))^{1-p} sigma_{n-1}); equals r^{n-p} for a radius-r ball.
inline double normalized_capacity(int n, double p, double cap) { return cap / (capacity_constant(n, p) * unit_sphere_area(n)); }

/// C* = normalized_capacity^{1/(n-p)}; equals r for a radius-r ball.
inline double capacity_radius(int n, double p, double cap) { return std::pow(normalized_capacity(n, p, cap), 1.0 / (n - p)); }

/// Radius r_e of the ball whose shell capacity with outer radius R equals
/// `truncated`. The truncated energy of a body is corrected to
/// ball_capacity(r_e), which is exact for balls.
inline double equivalent_shell_radius(int n, double p, double truncated, double big_r) {
  const double kappa = (n - p) / (p - 1.0);
  const double s = std::pow(truncated / (capacity_constant(n, p) * unit_sphere_area(n)), -1.0 / (p - 1.0));
  return std::pow(std::pow(big_r, -kappa) + s, -1.0 / kappa);
}

}  // namespace capgeo
