// Single-layer (Riesz) potential of the boundary measure in R^3,
//
//   S(x) = int_{dOmega} |x - y|^{-1} d sigma(y) / sigma_2,   x on dOmega,
//
// and its boundary average. The surface is parametrized by directions from
// the body center, d sigma = rho^2 / (omega . nu) d omega, and the inner
// integral uses polar coordinates about the direction of x so the 1/r
// singularity is cancelled by the polar area factor.
#pragma once

#include "capgeo/body.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace capgeo {

struct RieszConfig {
  int polar_nodes = 48;      // Gauss-Legendre nodes in the polar angle about x
  int azimuth_nodes = 48;    // trapezoid nodes around x
  int outer_theta = 24;      // Gauss-Legendre nodes in cos(theta) for the outer integral
  int outer_phi = 48;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;

  explicit GaussLegendre(int n) : x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n)) {
    if (n < 1) throw InvalidArgument("GaussLegendre: need at least one node");
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[static_cast<std::size_t>(i)] = z;
      w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

namespace detail {

inline void check_riesz_body(const Body& body) {
  if (body.dim() != 3) throw InvalidArgument("riesz: only n = 3 is supported");
}

/// Surface Jacobian rho^2 / (omega . nu) and boundary point for world direction w.
inline double surface_jacobian(const Body& body, const Point& w, Point& y) {
  const SurfaceSample s = body.surface(w);
  y = s.point;
  const double rho = (s.point - body.center()).norm();
  const double c = w.dot(s.normal);
  if (!(c > 1e-12)) throw NumericalError("riesz: boundary is not a radial graph about the center");
  return rho * rho / c;
}

}  // namespace detail

/// S(x) for the boundary point in world direction `dir` from the center.
inline double single_layer(const Body& body, const Point& dir, const RieszConfig& cfg = {}) {
  detail::check_riesz_body(body);
  const Point w0 = dir.normalized();
  Point x;
  (void)detail::surface_jacobian(body, w0, x);
  Point e1 = Point::Zero(3);
  e1[std::abs(w0[0]) < 0.9 ? 0 : 1] = 1.0;
  e1 = (e1 - e1.dot(w0) * w0).normalized();
  const Eigen::Vector3d a = w0.head<3>(), b = e1.head<3>();
  const Eigen::Vector3d c3 = a.cross(b);
  const Point e2 = Point(c3);
  const GaussLegendre gl(cfg.polar_nodes);
  double sum = 0.0;
  Point y;
  for (int i = 0; i < cfg.polar_nodes; ++i) {
    const double alpha = 0.5 * std::numbers::pi * (gl.x[static_cast<std::size_t>(i)] + 1.0);
    const double wa = 0.5 * std::numbers::pi * gl.w[static_cast<std::size_t>(i)];
    double ring = 0.0;
    for (int j = 0; j < cfg.azimuth_nodes; ++j) {
      const double beta = 2.0 * std::numbers::pi * (j + 0.5) / cfg.azimuth_nodes;
      const Point w = std::cos(alpha) * w0 + std::sin(alpha) * (std::cos(beta) * e1 + std::sin(beta) * e2);
      const double jac = detail::surface_jacobian(body, w, y);
      ring += jac / (x - y).norm();
    }
    sum += wa * std::sin(alpha) * ring * (2.0 * std::numbers::pi / cfg.azimuth_nodes);
  }
  return sum / unit_sphere_area(3);
}

struct RieszSample {
  Point direction;
  Point point;
  double value = 0.0;  // S(x)
};

/// S at `count` quasi-uniform boundary points.
inline std::vector<RieszSample> single_layer_samples(const Body& body, int count, const RieszConfig& cfg = {}) {
  detail::check_riesz_body(body);
  std::vector<RieszSample> out;
  for (const auto& d : Body::sphere_directions(3, count)) {
    RieszSample s;
    s.direction = d;
    s.point = body.surface(d).point;
    s.value = single_layer(body, d, cfg);
    out.push_back(s);
  }
  return out;
}

/// int int |x - y|^{-1} d sigma(x) d sigma(y).
inline double single_layer_energy(const Body& body, const RieszConfig& cfg = {}) {
  detail::check_riesz_body(body);
  const GaussLegendre gl(cfg.outer_theta);
  double sum = 0.0;
  Point y;
  for (int i = 0; i < cfg.outer_theta; ++i) {
    const double ct = gl.x[static_cast<std::size_t>(i)], st = std::sqrt(1.0 - ct * ct);
    for (int j = 0; j < cfg.outer_phi; ++j) {
      const double ph = 2.0 * std::numbers::pi * (j + 0.5) / cfg.outer_phi;
      Point w(3);
      w << st * std::cos(ph), st * std::sin(ph), ct;
      const double jac = detail::surface_jacobian(body, w, y);
      sum += gl.w[static_cast<std::size_t>(i)] * (2.0 * std::numbers::pi / cfg.outer_phi) * jac *
             single_layer(body, w, cfg) * unit_sphere_area(3);
    }
  }
  return sum;
}

}  // namespace capgeo
