// Shared types, error classes and closed-form constants.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace capgeo {

inline constexpr int kMaxDim = 8;

/// Point or vector in R^n, stored inline (no heap) for n <= kMaxDim.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed descriptor, config or file contents.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the inputs of an operation does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The numerics failed: no convergence, lost positivity, blow-up.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Smallest accepted length parameter (radius, semi-axis, rounding).
inline constexpr double kMinLength = 1e-9;

/// Surface area of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
inline double unit_sphere_area(int n) {
  if (n < 2) throw InvalidArgument("unit_sphere_area: dimension must be >= 2, got " + std::to_string(n));
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

inline Point zero_point(int n) { return Point::Zero(n); }

}  // namespace capgeo
