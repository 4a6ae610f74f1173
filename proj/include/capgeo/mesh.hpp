// Boundary discretizations.
//
// n = 2: closed inscribed polygon; n = 3: closed inscribed triangle mesh on a
// latitude/longitude chart. Element area and normal are those of the flat
// element, so the discrete surface is exactly closed; the mean curvature of
// an element is the analytic H of the body at the boundary point on the ray
// through the element centroid.
// n >= 4 (ball and ellipsoid only): tensor-product midpoint quadrature on the
// hyperspherical chart, with analytic weights, normals and curvature.
#pragma once

#include "capgeo/body.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace capgeo {

struct SurfaceElement {
  Point centroid;  // quadrature point
  Point normal;    // outward unit normal
  double weight = 0.0;          // area element d sigma
  double mean_curvature = 0.0;  // H, mean of principal curvatures
};

struct SurfaceMesh {
  int dim = 0;
  int resolution = 0;
  bool convex = false;
  bool polyhedral = false;  // flat elements with explicit vertices
  Point center;
  std::string body_descriptor;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> cells;  // triangles (n=3) or segments (n=2, third index unused)
  std::vector<SurfaceElement> elements;
  double max_element_size = 0.0;

  /// |sum nu d sigma| / sum d sigma: flux of a unit constant field through the closed surface.
  double closedness_flux() const {
    Point s = Point::Zero(dim);
    double a = 0.0;
    for (const auto& e : elements) {
      s += e.weight * e.normal;
      a += e.weight;
    }
    return s.norm() / a;
  }

  double min_curvature() const {
    double h = 1e300;
    for (const auto& e : elements) h = std::min(h, e.mean_curvature);
    return h;
  }
};

struct MeshLimits {
  int min_resolution = 4;
  int max_resolution = 2048;
  long long max_elements = 50'000'000;
};

namespace detail {

inline void finish_flat_element(const Body& body, SurfaceMesh& mesh, const Point& centroid, Point normal, double measure) {
  const Point c = body.center();
  if (normal.dot(centroid - c) <= 0.0)
    throw InvalidArgument("mesh_body: element faces the star center; body is not star-shaped at this resolution");
  const SurfaceSample s = body.surface(centroid - c);
  if (s.normal.dot(centroid - c) <= 0.0) throw InvalidArgument("mesh_body: radial function is not star-shaped");
  mesh.elements.push_back({centroid, normal, measure, s.mean_curvature});
}

inline SurfaceMesh mesh_planar(const Body& body, int resolution) {
  SurfaceMesh m;
  const int count = 2 * resolution;
  m.vertices.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double a = 2.0 * std::numbers::pi * j / count;
    Point w(2);
    w << std::cos(a), std::sin(a);
    m.vertices.push_back(body.to_world(body.local_radius(w) * w));
  }
  for (int j = 0; j < count; ++j) {
    const int k = (j + 1) % count;
    const Point& a = m.vertices[static_cast<std::size_t>(j)];
    const Point& b = m.vertices[static_cast<std::size_t>(k)];
    const Point t = b - a;
    const double len = t.norm();
    Point nu(2);
    nu << t[1] / len, -t[0] / len;  // counter-clockwise traversal: outward is to the right
    m.cells.push_back({j, k, -1});
    m.max_element_size = std::max(m.max_element_size, len);
    finish_flat_element(body, m, 0.5 * (a + b), nu, len);
  }
  return m;
}

inline SurfaceMesh mesh_spatial(const Body& body, int resolution) {
  SurfaceMesh m;
  const int nt = resolution;
  const int np = 2 * resolution;
  auto vertex = [&](double theta, double phi) {
    Point w(3);
    w << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
    return body.to_world(body.local_radius(w) * w);
  };
  m.vertices.push_back(vertex(0.0, 0.0));  // north pole
  for (int i = 1; i < nt; ++i)
    for (int j = 0; j < np; ++j) m.vertices.push_back(vertex(std::numbers::pi * i / nt, 2.0 * std::numbers::pi * j / np));
  m.vertices.push_back(vertex(std::numbers::pi, 0.0));  // south pole
  const int south = static_cast<int>(m.vertices.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * np + ((j % np) + np) % np; };
  for (int j = 0; j < np; ++j) m.cells.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i < nt - 1; ++i) {
    for (int j = 0; j < np; ++j) {
      const int a = ring(i, j), b = ring(i + 1, j), c = ring(i + 1, j + 1), d = ring(i, j + 1);
      m.cells.push_back({a, b, c});
      m.cells.push_back({a, c, d});
    }
  }
  for (int j = 0; j < np; ++j) m.cells.push_back({south, ring(nt - 1, j + 1), ring(nt - 1, j)});

  m.elements.reserve(m.cells.size());
  for (const auto& t : m.cells) {
    const Point& a = m.vertices[static_cast<std::size_t>(t[0])];
    const Point& b = m.vertices[static_cast<std::size_t>(t[1])];
    const Point& c = m.vertices[static_cast<std::size_t>(t[2])];
    const Eigen::Vector3d ab = (b - a).head<3>(), ac = (c - a).head<3>();
    const Eigen::Vector3d cr = ab.cross(ac);
    const double twice_area = cr.norm();
    m.max_element_size = std::max({m.max_element_size, (b - a).norm(), (c - b).norm(), (a - c).norm()});
    Point nu = Point(cr / twice_area);
    finish_flat_element(body, m, (a + b + c) / 3.0, nu, 0.5 * twice_area);
  }
  return m;
}

// Midpoint rule in every hyperspherical angle; weight rho^{n-1} d omega / <nu, omega>.
inline SurfaceMesh mesh_hyperspherical(const Body& body, int resolution, long long max_elements) {
  const int n = body.dim();
  if (body.kind() != BodyKind::ball && body.kind() != BodyKind::ellipsoid)
    throw InvalidArgument("mesh_body: n >= 4 supports ball and ellipsoid only");
  long long total = 2LL * resolution;
  for (int k = 0; k < n - 2; ++k) {
    total *= resolution;
    if (total > max_elements) throw InvalidArgument("mesh_body: resolution overflow for n = " + std::to_string(n));
  }
  SurfaceMesh m;
  m.elements.reserve(static_cast<std::size_t>(total));
  const double dt = std::numbers::pi / resolution;
  const double dp = std::numbers::pi / resolution;  // 2 pi / (2 res)
  std::vector<int> idx(static_cast<std::size_t>(n - 2), 0);
  for (long long e = 0; e < total / (2LL * resolution); ++e) {
    long long rem = e;
    for (int k = 0; k < n - 2; ++k) {
      idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % resolution);
      rem /= resolution;
    }
    for (int j = 0; j < 2 * resolution; ++j) {
      Point w(n);
      double s = 1.0, jac = dt;
      for (int k = 0; k < n - 2; ++k) {
        const double th = (idx[static_cast<std::size_t>(k)] + 0.5) * dt;
        w[k] = s * std::cos(th);
        s *= std::sin(th);
        jac *= std::pow(std::sin(th), n - 2 - k);
        if (k > 0) jac *= dt;
      }
      const double ph = (j + 0.5) * dp;
      w[n - 2] = s * std::cos(ph);
      w[n - 1] = s * std::sin(ph);
      jac *= dp;
      const Point wd = body.rotation() * w;
      const SurfaceSample smp = body.surface(wd);
      const double rho = body.local_radius(w);
      const double weight = std::pow(rho, n - 1) * jac / smp.normal.dot(wd);
      m.elements.push_back({smp.point, smp.normal, weight, smp.mean_curvature});
      m.max_element_size = std::max(m.max_element_size, rho * std::max(dt, dp));
    }
  }
  return m;
}

}  // namespace detail

/// Discretize the boundary of `body`. `resolution` is the number of polar
/// subdivisions (n = 3), half the polygon size (n = 2), or the number of
/// midpoints per hyperspherical angle (n >= 4).
inline SurfaceMesh mesh_body(const Body& body, int resolution, const MeshLimits& limits = {}) {
  if (resolution < limits.min_resolution || resolution > limits.max_resolution)
    throw InvalidArgument("mesh_body: resolution " + std::to_string(resolution) + " outside [" +
                          std::to_string(limits.min_resolution) + ", " + std::to_string(limits.max_resolution) + "]");
  SurfaceMesh m;
  const int n = body.dim();
  if (n == 2) {
    m = detail::mesh_planar(body, resolution);
    m.polyhedral = true;
  } else if (n == 3) {
    if (2LL * resolution * resolution > limits.max_elements) throw InvalidArgument("mesh_body: resolution overflow");
    m = detail::mesh_spatial(body, resolution);
    m.polyhedral = true;
  } else {
    m = detail::mesh_hyperspherical(body, resolution, limits.max_elements);
  }
  m.dim = n;
  m.resolution = resolution;
  m.convex = body.convex_kind();
  m.center = body.center();
  m.body_descriptor = body.descriptor();
  if (m.convex && m.min_curvature() < -1e-8) throw NumericalError("mesh_body: negative mean curvature on a convex body");
  return m;
}

}  // namespace capgeo
