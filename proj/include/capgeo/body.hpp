// Convex and star-shaped bodies in R^n.
//
// Every body is star-shaped about its center, so it is described by the
// radial function rho(omega) in body-local coordinates y = R^T (x - c).
// Mean curvature H is the arithmetic mean of the principal curvatures
// (H = 1/r on a radius-r sphere).
#pragma once

#include "capgeo/common.hpp"
#include "capgeo/radial_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace capgeo {

enum class BodyKind { ball, ellipsoid, superellipsoid, rounded_box, radial_graph };

inline std::string to_string(BodyKind k) {
  switch (k) {
    case BodyKind::ball: return "ball";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::superellipsoid: return "superellipsoid";
    case BodyKind::rounded_box: return "roundedbox";
    case BodyKind::radial_graph: return "radial";
  }
  return "?";
}

/// Point on the boundary with its outward unit normal and mean curvature.
struct SurfaceSample {
  Point point;
  Point normal;
  double mean_curvature = 0.0;
};

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Body {
 public:
  static Body ball(int n, double r, std::optional<Point> center = std::nullopt) {
    if (n < 2 || n > kMaxDim) throw InvalidArgument("ball: dimension out of range");
    check_length(r, "ball radius");
    Body b(BodyKind::ball, n);
    b.radius_ = r;
    if (center) {
      if (center->size() != n) throw InvalidArgument("ball: center has wrong dimension");
      b.center_ = *center;
    }
    return b;
  }

  static Body ellipsoid(const Point& semi_axes) {
    const int n = static_cast<int>(semi_axes.size());
    if (n < 2 || n > kMaxDim) throw InvalidArgument("ellipsoid: dimension out of range");
    for (int i = 0; i < n; ++i) check_length(semi_axes[i], "ellipsoid semi-axis");
    Body b(BodyKind::ellipsoid, n);
    b.axes_ = semi_axes;
    b.validate_convexity();
    return b;
  }

  static Body superellipsoid(const Point& semi_axes, double exponent) {
    const int n = static_cast<int>(semi_axes.size());
    if (n < 2 || n > kMaxDim) throw InvalidArgument("superellipsoid: dimension out of range");
    for (int i = 0; i < n; ++i) check_length(semi_axes[i], "superellipsoid semi-axis");
    if (!(exponent >= 2.0)) throw InvalidArgument("superellipsoid exponent must be >= 2");
    Body b(BodyKind::superellipsoid, n);
    b.axes_ = semi_axes;
    b.exponent_ = exponent;
    b.validate_convexity();
    return b;
  }

  /// Box with outer half-widths `half_widths` whose edges and corners are
  /// rounded with radius `rounding` (Minkowski sum of a core box and a ball).
  static Body rounded_box(const Point& half_widths, double rounding) {
    const int n = static_cast<int>(half_widths.size());
    if (n < 2 || n > kMaxDim) throw InvalidArgument("roundedbox: dimension out of range");
    check_length(rounding, "roundedbox rounding radius");
    for (int i = 0; i < n; ++i) {
      check_length(half_widths[i], "roundedbox half-width");
      if (half_widths[i] < rounding) throw InvalidArgument("roundedbox: rounding radius exceeds a half-width");
    }
    Body b(BodyKind::rounded_box, n);
    b.axes_ = half_widths;
    b.rounding_ = rounding;
    b.validate_convexity();
    return b;
  }

  static Body radial_graph(RadialFunction f, std::string source = {}) {
    const int n = f.dim();
    Body b(BodyKind::radial_graph, n);
    b.radial_ = std::make_shared<RadialFunction>(std::move(f));
    b.radial_source_ = std::move(source);
    // strictly positive radius on a dense direction sample
    for (const auto& d : sphere_directions(n, 10000)) {
      if (!((*b.radial_)(d) > kMinLength)) throw InvalidArgument("radial graph: radial function is not strictly positive");
    }
    b.cache_radial_extent();
    return b;
  }

  Body translated(const Point& offset) const {
    if (offset.size() != dim_) throw InvalidArgument("translate: wrong dimension");
    Body b = *this;
    b.center_ += offset;
    return b;
  }

  /// Rotate by `degrees` in the (i, j) coordinate plane about the center.
  Body rotated(int i, int j, double degrees) const {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_ || i == j) throw InvalidArgument("rotate: bad axis pair");
    const double a = degrees * std::numbers::pi / 180.0;
    Matrix g = Matrix::Identity(dim_, dim_);
    g(i, i) = std::cos(a);
    g(j, j) = std::cos(a);
    g(i, j) = -std::sin(a);
    g(j, i) = std::sin(a);
    Body b = *this;
    b.rotation_ = g * rotation_;
    b.rotations_.push_back({i, j, degrees});
    return b;
  }

  /// Homothety by lambda about the center.
  Body scaled(double lambda) const {
    check_length(lambda, "scale factor");
    Body b = *this;
    b.radius_ *= lambda;
    b.axes_ *= lambda;
    b.rounding_ *= lambda;
    if (radial_) {
      b.radial_ = std::make_shared<RadialFunction>(radial_->scaled(lambda));
      b.radial_source_.clear();
      b.cache_radial_extent();
    }
    return b;
  }

  int dim() const { return dim_; }
  BodyKind kind() const { return kind_; }
  const Point& center() const { return center_; }
  const Matrix& rotation() const { return rotation_; }
  bool convex_kind() const { return kind_ != BodyKind::radial_graph; }
  /// Smooth with H > 0 everywhere (flat patches or vanishing curvature excluded).
  bool strictly_curved() const { return kind_ == BodyKind::ball || kind_ == BodyKind::ellipsoid; }
  bool is_rotated() const { return !rotations_.empty(); }
  double ball_radius() const { return radius_; }
  const Point& semi_axes() const { return axes_; }
  double exponent() const { return exponent_; }
  double rounding() const { return rounding_; }
  const RadialFunction* radial_function() const { return radial_.get(); }

  Point to_local(const Point& x) const { return rotation_.transpose() * (x - center_); }
  Point to_world(const Point& y) const { return rotation_ * y + center_; }

  /// Closed-set membership.
  bool contains(const Point& x) const {
    const Point y = to_local(x);
    switch (kind_) {
      case BodyKind::ball: return y.squaredNorm() <= radius_ * radius_;
      case BodyKind::ellipsoid: return y.cwiseQuotient(axes_).squaredNorm() <= 1.0;
      case BodyKind::superellipsoid: {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(y[i] / axes_[i]), exponent_);
        return s <= 1.0;
      }
      case BodyKind::rounded_box: return rounded_box_sdf(y) <= 0.0;
      case BodyKind::radial_graph: {
        const double r = y.norm();
        return r == 0.0 || r <= (*radial_)(y);
      }
    }
    return false;
  }

  /// Distance from the center to the boundary along the world direction `dir`.
  double radial_distance(const Point& dir) const { return local_radius(rotation_.transpose() * dir.normalized()); }

  /// Boundary point hit by the ray from the center in world direction `dir`.
  SurfaceSample surface(const Point& dir) const {
    const Point w = rotation_.transpose() * dir.normalized();
    const double rho = local_radius(w);
    const Point y = rho * w;
    Point nu;
    double h = 0.0;
    local_normal_curvature(y, nu, h);
    return {to_world(y), rotation_ * nu, h};
  }

  /// Radius of the largest center-centred ball inside the body.
  double inradius() const {
    switch (kind_) {
      case BodyKind::ball: return radius_;
      case BodyKind::ellipsoid:
      case BodyKind::superellipsoid:
      case BodyKind::rounded_box: return axes_.minCoeff();
      case BodyKind::radial_graph: return radial_min_;
    }
    return 0.0;
  }

  /// Radius of the smallest center-centred ball containing the body.
  double circumradius() const {
    switch (kind_) {
      case BodyKind::ball: return radius_;
      case BodyKind::ellipsoid: return axes_.maxCoeff();
      case BodyKind::superellipsoid: {
        // minimizer of sum |w_i/a_i|^e on the unit sphere has w_i ~ a_i^{e/(e-2)}
        if (exponent_ <= 2.0 + 1e-12) return axes_.maxCoeff();
        Point w(dim_);
        for (int i = 0; i < dim_; ++i) w[i] = std::pow(axes_[i], exponent_ / (exponent_ - 2.0));
        return std::max(local_radius(w.normalized()), axes_.maxCoeff());
      }
      case BodyKind::rounded_box: {
        Point q = axes_.array() - rounding_;
        return q.norm() + rounding_;
      }
      case BodyKind::radial_graph: return radial_max_;
    }
    return 0.0;
  }

  /// Canonical descriptor string (parses back to the same body).
  std::string descriptor() const {
    std::string s;
    auto list = [&](const Point& v) {
      std::string out;
      for (int i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
      return out;
    };
    switch (kind_) {
      case BodyKind::ball:
        s = "ball:r=" + format_number(radius_);
        if (dim_ != 3) s += ";n=" + std::to_string(dim_);
        break;
      case BodyKind::ellipsoid: s = "ellipsoid:" + list(axes_); break;
      case BodyKind::superellipsoid: s = "superellipsoid:" + list(axes_) + ";e=" + format_number(exponent_); break;
      case BodyKind::rounded_box: s = "roundedbox:" + list(axes_) + ";r=" + format_number(rounding_); break;
      case BodyKind::radial_graph: s = "radial:" + (radial_source_.empty() ? std::string("<inline>") : radial_source_); break;
    }
    if (center_.norm() > 0.0) s += ";c=" + list(center_);
    for (const auto& r : rotations_) s += ";rot=" + std::to_string(r.i) + "," + std::to_string(r.j) + "," + format_number(r.degrees);
    return s;
  }

  /// Fraction of `pairs` random boundary-point pairs whose midpoint lies
  /// outside the body (0 for a convex body).
  double sampled_convexity_violation(int pairs, std::uint64_t seed = 12345) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto random_dir = [&] {
      Point d(dim_);
      for (int i = 0; i < dim_; ++i) d[i] = g(rng);
      return Point(d.normalized());
    };
    int bad = 0;
    for (int k = 0; k < pairs; ++k) {
      const Point a = random_dir();
      const Point b = random_dir();
      const Point pa = a * local_radius_unchecked(a);
      const Point pb = b * local_radius_unchecked(b);
      const Point mid = 0.5 * (pa + pb);
      const double r = mid.norm();
      if (r == 0.0) continue;
      if (r > local_radius_unchecked(mid / r) * (1.0 + 1e-9)) ++bad;
    }
    return static_cast<double>(bad) / pairs;
  }

  /// Quasi-uniform directions on S^{n-1} (spherical Fibonacci for n = 3).
  static std::vector<Point> sphere_directions(int n, int count) {
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    if (n == 2) {
      for (int i = 0; i < count; ++i) {
        const double a = 2.0 * std::numbers::pi * (i + 0.5) / count;
        Point p(2);
        p << std::cos(a), std::sin(a);
        out.push_back(p);
      }
    } else if (n == 3) {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        Point p(3);
        p << s * std::cos(golden * i), s * std::sin(golden * i), z;
        out.push_back(p);
      }
    } else {
      std::mt19937_64 rng(7);
      std::normal_distribution<double> g(0.0, 1.0);
      for (int i = 0; i < count; ++i) {
        Point p(n);
        for (int k = 0; k < n; ++k) p[k] = g(rng);
        out.push_back(p.normalized());
      }
    }
    return out;
  }

  /// Radius in a unit local direction.
  double local_radius(const Point& w) const { return local_radius_unchecked(w); }

 private:
  struct RotationOp {
    int i, j;
    double degrees;
  };

  Body(BodyKind kind, int n)
      : dim_(n), kind_(kind), center_(Point::Zero(n)), rotation_(Matrix::Identity(n, n)), axes_(Point::Zero(n)) {}

  static void check_length(double v, const char* what) {
    if (!(v >= kMinLength) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be >= 1e-9");
  }

  void validate_convexity() const {
    if (sampled_convexity_violation(10000) > 0.0) throw InvalidArgument(to_string(kind_) + ": sampled convexity test failed");
  }

  void cache_radial_extent() {
    radial_min_ = 1e300;
    radial_max_ = 0.0;
    for (const auto& d : sphere_directions(dim_, 20000)) {
      const double r = (*radial_)(d);
      radial_min_ = std::min(radial_min_, r);
      radial_max_ = std::max(radial_max_, r);
    }
  }

  double rounded_box_sdf(const Point& y) const {
    const Point q = axes_.array() - rounding_;
    const Point d = y.cwiseAbs() - q;
    const double outside = d.cwiseMax(0.0).norm();
    const double inside = std::min(d.maxCoeff(), 0.0);
    return outside + inside - rounding_;
  }

  double local_radius_unchecked(const Point& w) const {
    switch (kind_) {
      case BodyKind::ball: return radius_;
      case BodyKind::ellipsoid: return 1.0 / w.cwiseQuotient(axes_).norm();
      case BodyKind::superellipsoid: {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(w[i] / axes_[i]), exponent_);
        return std::pow(s, -1.0 / exponent_);
      }
      case BodyKind::rounded_box: {
        double lo = axes_.minCoeff() * 0.5;
        double hi = (Point(axes_.array() - rounding_).norm() + rounding_) * 1.000001;
        for (int it = 0; it < 64; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (rounded_box_sdf(mid * w) <= 0.0)
            lo = mid;
          else
            hi = mid;
        }
        return 0.5 * (lo + hi);
      }
      case BodyKind::radial_graph: return (*radial_)(w);
    }
    return 0.0;
  }

  // Normal and mean curvature at a local boundary point y.
  void local_normal_curvature(const Point& y, Point& nu, double& h) const {
    const int n = dim_;
    switch (kind_) {
      case BodyKind::ball:
        nu = y.normalized();
        h = 1.0 / radius_;
        return;
      case BodyKind::ellipsoid:
      case BodyKind::superellipsoid: {
        const double e = kind_ == BodyKind::ellipsoid ? 2.0 : exponent_;
        Point grad(n), hess(n);
        for (int i = 0; i < n; ++i) {
          const double t = std::abs(y[i]) / axes_[i];
          const double sgn = y[i] < 0 ? -1.0 : 1.0;
          grad[i] = e * sgn * std::pow(t, e - 1.0) / axes_[i];
          hess[i] = e * (e - 1.0) * std::pow(t, e - 2.0) / (axes_[i] * axes_[i]);
        }
        implicit_curvature(grad, hess, nu, h);
        return;
      }
      case BodyKind::rounded_box: {
        const Point q = axes_.array() - rounding_;
        const double tol = 1e-10 * (q.norm() + rounding_);
        Point d(n);
        int k = 0;
        for (int i = 0; i < n; ++i) {
          const double a = std::abs(y[i]) - q[i];
          if (a > tol) {
            d[i] = y[i] < 0 ? -a : a;
            ++k;
          } else {
            d[i] = 0.0;
          }
        }
        if (k == 0) throw NumericalError("roundedbox: point is not on the boundary");
        nu = d.normalized();
        h = (k - 1) / ((n - 1) * rounding_);
        return;
      }
      case BodyKind::radial_graph: radial_normal_curvature(y, nu, h); return;
    }
  }

  // H = (|g|^2 tr(Hs) - g^T Hs g) / ((n-1) |g|^3) for a diagonal Hessian Hs.
  void implicit_curvature(const Point& grad, const Point& hess_diag, Point& nu, double& h) const {
    const double g2 = grad.squaredNorm();
    const double g = std::sqrt(g2);
    double tr = 0.0, q = 0.0;
    for (int i = 0; i < dim_; ++i) {
      tr += hess_diag[i];
      q += grad[i] * grad[i] * hess_diag[i];
    }
    nu = grad / g;
    h = (g2 * tr - q) / ((dim_ - 1) * g2 * g);
  }

  // Unit normal of the level sets of F(y) = |y| - rho(y/|y|) by central differences.
  Point radial_level_normal(const Point& y, double eps) const {
    Point g(dim_);
    for (int i = 0; i < dim_; ++i) {
      Point a = y, b = y;
      a[i] += eps;
      b[i] -= eps;
      g[i] = (a.norm() - (*radial_)(a)) - (b.norm() - (*radial_)(b));
    }
    return g.normalized();
  }

  // Curvature from the divergence of the finite-differenced unit normal field.
  void radial_normal_curvature(const Point& y, Point& nu, double& h) const {
    const double s = y.norm();
    const double eps = 1e-5 * s;
    const double eta = 2e-4 * s;
    nu = radial_level_normal(y, eps);
    double div = 0.0;
    for (int i = 0; i < dim_; ++i) {
      Point a = y, b = y;
      a[i] += eta;
      b[i] -= eta;
      div += (radial_level_normal(a, eps)[i] - radial_level_normal(b, eps)[i]) / (2.0 * eta);
    }
    h = div / (dim_ - 1);
  }

  int dim_;
  BodyKind kind_;
  Point center_;
  Matrix rotation_;
  std::vector<RotationOp> rotations_;
  double radius_ = 0.0;
  Point axes_;
  double exponent_ = 2.0;
  double rounding_ = 0.0;
  std::shared_ptr<const RadialFunction> radial_;
  std::string radial_source_;
  double radial_min_ = 0.0;
  double radial_max_ = 0.0;
};

}  // namespace capgeo
