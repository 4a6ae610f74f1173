// Checks on a converged equilibrium potential: constant flux through level
// sets, convexity of the superlevel sets, and the capacity of a superlevel set.
#pragma once

#include "capgeo/capacity_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace capgeo {

/// Multilinear interpolation of a field and its piecewise gradient.
class FieldSampler {
 public:
  explicit FieldSampler(const PotentialField& f) : f_(f), a_(f.far_value()) {}

  /// Far-field offset a: the untruncated potential is a + (1 - a) u.
  double offset() const { return a_; }

  double raw(const Point& x) const {
    Locate loc = locate(x);
    double v = 0.0;
    for (int c = 0; c < (1 << f_.dim); ++c) v += weight(loc, c, -1) * f_.values[node(loc, c)];
    return v;
  }

  /// Untruncated (reconstructed) potential.
  double operator()(const Point& x) const { return a_ + (1.0 - a_) * raw(x); }

  Point gradient(const Point& x) const {
    Locate loc = locate(x);
    Point g = Point::Zero(f_.dim);
    for (int a = 0; a < f_.dim; ++a)
      for (int c = 0; c < (1 << f_.dim); ++c) g[a] += weight(loc, c, a) * f_.values[node(loc, c)];
    return (1.0 - a_) * g;
  }

 private:
  struct Locate {
    std::array<std::size_t, kMaxDim> i{};
    std::array<double, kMaxDim> t{};
    std::array<double, kMaxDim> h{};
  };

  Locate locate(const Point& x) const {
    Locate l;
    for (int a = 0; a < f_.dim; ++a) {
      const auto& ax = f_.axes[static_cast<std::size_t>(a)];
      const double xa = std::clamp(x[a], ax.front(), ax.back());
      const auto it = std::upper_bound(ax.begin(), ax.end(), xa);
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - ax.begin() - 1, 0)),
                                                  ax.size() - 2);
      l.i[static_cast<std::size_t>(a)] = i;
      l.h[static_cast<std::size_t>(a)] = ax[i + 1] - ax[i];
      l.t[static_cast<std::size_t>(a)] = (xa - ax[i]) / l.h[static_cast<std::size_t>(a)];
    }
    return l;
  }

  std::size_t node(const Locate& l, int c) const {
    std::size_t k = 0, stride = 1;
    for (int a = 0; a < f_.dim; ++a) {
      k += (l.i[static_cast<std::size_t>(a)] + static_cast<std::size_t>((c >> a) & 1)) * stride;
      stride *= f_.count(a);
    }
    return k;
  }

  // product weight of corner c; `deriv` selects the axis differentiated (-1: none)
  double weight(const Locate& l, int c, int deriv) const {
    double w = 1.0;
    for (int a = 0; a < f_.dim; ++a) {
      const bool bit = (c >> a) & 1;
      const double t = l.t[static_cast<std::size_t>(a)];
      if (a == deriv)
        w *= (bit ? 1.0 : -1.0) / l.h[static_cast<std::size_t>(a)];
      else
        w *= bit ? t : 1.0 - t;
    }
    return w;
  }

  const PotentialField& f_;
  double a_;
};

struct LevelSetRecord {
  double level = 0.0;  // t, a value of the untruncated potential
  double area = 0.0;
  double flux = 0.0;   // integral of |grad u|^{p-1} over {u = t}
  std::size_t elements = 0;
  double convexity_violation = 0.0;  // fraction of sampled chords leaving {u >= t}
  bool convex = false;
};

struct ScalingRecord {
  double level = 0.0;
  double capacity = 0.0;  // re-solved capacity of {u >= t}
  double expected = 0.0;  // t^{1-p} cap_p
  double relative_error = 0.0;
};

struct DiagnosticsConfig {
  std::vector<double> levels{0.2, 0.4, 0.6, 0.8};
  std::vector<double> scaling_levels{0.5};
  int convexity_pairs = 4000;
  double convexity_slack = 2e-3;  // relative radial slack for chord midpoints
  int level_fit_degree = 12;
  int level_fit_samples = 2000;
  SolverConfig resolve;  // solver settings for the superlevel-set capacities
};

struct EquilibriumDiagnostics {
  double p = 0.0;
  double capacity = 0.0;  // reference capacity of the body
  double far_value = 0.0;
  std::vector<LevelSetRecord> levels;
  double flux_spread = 0.0;  // (max - min) / capacity over the levels
  std::vector<ScalingRecord> scaling;
};

namespace detail {

// Marching simplices: area and gradient-weighted flux of {u = level} on the linear interpolant.
struct LevelSurface {
  double area = 0.0;
  double flux = 0.0;
  std::size_t elements = 0;
};

inline LevelSurface extract_level(const PotentialField& f, double raw_level, double gradient_scale) {
  const int n = f.dim;
  LevelSurface out;
  std::vector<std::size_t> stride(static_cast<std::size_t>(n));
  std::size_t cells = 1, s = 1;
  for (int a = 0; a < n; ++a) {
    stride[static_cast<std::size_t>(a)] = s;
    s *= f.count(a);
    cells *= f.count(a) - 1;
  }
  // Kuhn triangulation: one simplex per axis permutation
  std::vector<std::vector<int>> perms;
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) perm[static_cast<std::size_t>(a)] = a;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  std::vector<Point> vx(static_cast<std::size_t>(n + 1), Point(n));
  std::vector<double> vv(static_cast<std::size_t>(n + 1));
  std::vector<std::size_t> vn(static_cast<std::size_t>(n + 1));
  for (std::size_t ci = 0; ci < cells; ++ci) {
    std::size_t rem = ci, base = 0;
    double lo = 1e300, hi = -1e300;
    for (int a = 0; a < n; ++a) {
      const std::size_t m = f.count(a) - 1;
      idx[static_cast<std::size_t>(a)] = rem % m;
      rem /= m;
      base += idx[static_cast<std::size_t>(a)] * stride[static_cast<std::size_t>(a)];
    }
    for (int c = 0; c < (1 << n); ++c) {
      std::size_t k = base;
      for (int a = 0; a < n; ++a)
        if (c & (1 << a)) k += stride[static_cast<std::size_t>(a)];
      lo = std::min(lo, f.values[k]);
      hi = std::max(hi, f.values[k]);
    }
    if (!(lo < raw_level && hi > raw_level)) continue;
    for (const auto& pm : perms) {
      std::vector<int> bits(static_cast<std::size_t>(n), 0);
      for (int v = 0; v <= n; ++v) {
        if (v > 0) bits[static_cast<std::size_t>(pm[static_cast<std::size_t>(v - 1)])] = 1;
        std::size_t k = base;
        Point x(n);
        for (int a = 0; a < n; ++a) {
          const std::size_t i = idx[static_cast<std::size_t>(a)] + static_cast<std::size_t>(bits[static_cast<std::size_t>(a)]);
          k += static_cast<std::size_t>(bits[static_cast<std::size_t>(a)]) * stride[static_cast<std::size_t>(a)];
          x[a] = f.axes[static_cast<std::size_t>(a)][i];
        }
        vx[static_cast<std::size_t>(v)] = x;
        vv[static_cast<std::size_t>(v)] = f.values[k] - raw_level;
        vn[static_cast<std::size_t>(v)] = k;
      }
      int pos = 0;
      for (int v = 0; v <= n; ++v) pos += vv[static_cast<std::size_t>(v)] > 0.0;
      if (pos == 0 || pos == n + 1) continue;
      for (int v = 0; v <= n; ++v)
        if (f.state[vn[static_cast<std::size_t>(v)]] == NodeState::outer)
          throw NumericalError("equilibrium_diagnostics: level set touches the box boundary");
      // gradient of the linear interpolant on the simplex
      Matrix e(n, n);
      Point dv(n);
      for (int r = 0; r < n; ++r) {
        e.row(r) = (vx[static_cast<std::size_t>(r + 1)] - vx[0]).transpose();
        dv[r] = vv[static_cast<std::size_t>(r + 1)] - vv[0];
      }
      const Point g = e.fullPivLu().solve(dv);
      const double gn = g.norm();
      // crossing points on edges with a sign change
      std::vector<Point> pts;
      for (int a = 0; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) {
          const double va = vv[static_cast<std::size_t>(a)], vb = vv[static_cast<std::size_t>(b)];
          if ((va > 0.0) == (vb > 0.0)) continue;
          const double t = va / (va - vb);
          pts.push_back(vx[static_cast<std::size_t>(a)] + t * (vx[static_cast<std::size_t>(b)] - vx[static_cast<std::size_t>(a)]));
        }
      double measure = 0.0;
      if (n == 2) {
        measure = (pts[1] - pts[0]).norm();
      } else if (n == 3) {
        auto tri = [](const Point& a, const Point& b, const Point& c) {
          const Eigen::Vector3d u = (b - a).head<3>(), w = (c - a).head<3>();
          return 0.5 * u.cross(w).norm();
        };
        measure = tri(pts[0], pts[1], pts[2]);
        if (pts.size() == 4) {
          // quad ordering: edges (0,2),(0,3),(1,2),(1,3) for a 2-2 split give a planar quad 0-1-3-2
          measure = tri(pts[0], pts[1], pts[3]) + tri(pts[0], pts[3], pts[2]);
        }
      } else {
        throw InvalidArgument("equilibrium_diagnostics: n = 2 or 3 only");
      }
      out.area += measure;
      out.flux += measure * std::pow(gradient_scale * gn, f.p - 1.0);
      ++out.elements;
    }
  }
  return out;
}

// Radius of {u >= t} along the unit direction d (untruncated potential).
inline double level_radius(const FieldSampler& u, const Point& center, const Point& d, double level, double r_min, double r_max) {
  double lo = r_min, hi = r_max;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (u(center + mid * d) >= level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Flux, convexity and superlevel-set capacity diagnostics. `estimate` is the
/// capacity estimate of `body` the field belongs to.
inline EquilibriumDiagnostics equilibrium_diagnostics(const PotentialField& field, const Body& body,
                                                      const PCapacityEstimate& estimate, const DiagnosticsConfig& cfg = {}) {
  if (field.values.empty()) throw InvalidArgument("equilibrium_diagnostics: empty field");
  const int n = field.dim;
  const double p = field.p;
  EquilibriumDiagnostics out;
  out.p = p;
  out.capacity = estimate.value;
  const FieldSampler u(field);
  out.far_value = u.offset();
  const double a = u.offset();
  const Point c = body.center();
  const double r_max = field.box_radius;
  const auto dirs = Body::sphere_directions(n, cfg.level_fit_samples);

  double fmin = 1e300, fmax = -1e300;
  for (const double t : cfg.levels) {
    if (!(t > a && t < 1.0))
      throw NumericalError("equilibrium_diagnostics: level " + format_number(t) + " lies outside the box (far value " +
                           format_number(a) + ")");
    LevelSetRecord rec;
    rec.level = t;
    const auto surf = detail::extract_level(field, (t - a) / (1.0 - a), 1.0 - a);
    rec.area = surf.area;
    rec.flux = surf.flux;
    rec.elements = surf.elements;
    // chord midpoints of random level-set point pairs must stay in {u >= t}
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss;
    auto random_dir = [&] {
      Point d(n);
      for (int k = 0; k < n; ++k) d[k] = gauss(rng);
      return Point(d.normalized());
    };
    int bad = 0;
    for (int k = 0; k < cfg.convexity_pairs; ++k) {
      const Point d1 = random_dir(), d2 = random_dir();
      const Point x1 = c + detail::level_radius(u, c, d1, t, body.radial_distance(d1), r_max) * d1;
      const Point x2 = c + detail::level_radius(u, c, d2, t, body.radial_distance(d2), r_max) * d2;
      const Point m = 0.5 * (x1 + x2) - c;
      const double rm = m.norm();
      if (rm < 1e-12) continue;
      const Point dm = m / rm;
      const double rl = detail::level_radius(u, c, dm, t, body.radial_distance(dm), r_max);
      if (rm > rl * (1.0 + cfg.convexity_slack)) ++bad;
    }
    rec.convexity_violation = double(bad) / cfg.convexity_pairs;
    rec.convex = bad == 0;
    fmin = std::min(fmin, rec.flux);
    fmax = std::max(fmax, rec.flux);
    out.levels.push_back(rec);
  }
  if (!out.levels.empty()) out.flux_spread = (fmax - fmin) / out.capacity;

  for (const double t : cfg.scaling_levels) {
    if (!(t > a && t < 1.0)) throw NumericalError("equilibrium_diagnostics: scaling level outside the box");
    std::vector<double> radii;
    radii.reserve(dirs.size());
    for (const Point& d : dirs) radii.push_back(detail::level_radius(u, c, d, t, body.radial_distance(d), r_max));
    const int degree = n == 2 ? 2 * cfg.level_fit_degree : cfg.level_fit_degree;
    const Body level_body = Body::radial_graph(RadialFunction::fit(n, dirs, radii, degree), "level set").translated(c);
    const auto est = solve_p_capacity(level_body, p, cfg.resolve);
    ScalingRecord rec;
    rec.level = t;
    rec.capacity = est.value;
    rec.expected = std::pow(t, 1.0 - p) * out.capacity;
    rec.relative_error = rec.capacity / rec.expected - 1.0;
    out.scaling.push_back(rec);
  }
  return out;
}

}  // namespace capgeo
