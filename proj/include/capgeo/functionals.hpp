// Area, volume and Willmore-type integrals of a boundary discretization.
#pragma once

#include "capgeo/mesh.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace capgeo {

struct WillmoreValue {
  double exponent = 0.0;  // q
  double value = 0.0;     // int H^{q-1} d sigma / sigma_{n-1}
};

struct GeometricFunctionals {
  int dim = 0;
  double area = 0.0;
  double volume = 0.0;
  std::vector<WillmoreValue> willmore;
  double normalized_area = 0.0;    // A* = (area / sigma)^{1/(n-1)}
  double normalized_volume = 0.0;  // V* = (volume / (sigma / n))^{1/n}

  double willmore_at(double q) const {
    for (const auto& w : willmore)
      if (std::abs(w.exponent - q) < 1e-12) return w.value;
    throw InvalidArgument("willmore functional for q = " + std::to_string(q) + " was not computed");
  }
};

/// Integrals over `mesh`; every exponent must lie in [1, n].
inline GeometricFunctionals functionals(const SurfaceMesh& mesh, std::span<const double> exponents) {
  const int n = mesh.dim;
  const double sigma = unit_sphere_area(n);
  for (const double q : exponents)
    if (!(q >= 1.0 && q <= n)) throw InvalidArgument("willmore exponent " + std::to_string(q) + " outside [1, n]");
  GeometricFunctionals f;
  f.dim = n;
  std::vector<double> sums(exponents.size(), 0.0);
  for (const auto& e : mesh.elements) {
    f.area += e.weight;
    f.volume += e.centroid.dot(e.normal) * e.weight;
    for (std::size_t k = 0; k < exponents.size(); ++k) {
      const double q = exponents[k];
      if (q == 1.0) {
        sums[k] += e.weight;
        continue;
      }
      if (e.mean_curvature < 0.0 || (!mesh.convex && e.mean_curvature <= 0.0))
        throw NumericalError("functionals: non-positive mean curvature with willmore exponent > 1");
      sums[k] += std::pow(e.mean_curvature, q - 1.0) * e.weight;
    }
  }
  f.volume /= n;
  for (std::size_t k = 0; k < exponents.size(); ++k) f.willmore.push_back({exponents[k], sums[k] / sigma});
  f.normalized_area = std::pow(f.area / sigma, 1.0 / (n - 1));
  f.normalized_volume = std::pow(f.volume / (sigma / n), 1.0 / n);
  return f;
}

inline GeometricFunctionals functionals(const SurfaceMesh& mesh, std::initializer_list<double> exponents) {
  const std::vector<double> q(exponents);
  return functionals(mesh, std::span<const double>(q));
}

}  // namespace capgeo
