// Inverse mean curvature flow of planar curves and axisymmetric surfaces
// written as radial graphs rho(theta) about the body center.
//
// n = 2: theta in [0, 2 pi), periodic midpoint grid.
// n = 3: theta in (0, pi) measured from the symmetry (z) axis, even
//        reflection at both poles.
#pragma once

#include "capgeo/body.hpp"
#include "capgeo/capacity_formulas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace capgeo {

enum class FlowSymmetry { planar_curve, axisymmetric_surface };

struct FlowConfig {
  int samples = 0;            // angular samples; 0 selects 64 (n = 2) or 48 (n = 3)
  double dt = 1e-3;           // recording step
  double cfl = 0.2;
  bool substep = true;        // split dt into stable substeps instead of failing
  int max_substeps = 10000;
  double max_radius = 1e12;
  int record_every = 1;
};

/// Radial samples of the evolving hypersurface at time t.
struct FlowSurface {
  int dim = 0;
  FlowSymmetry symmetry = FlowSymmetry::planar_curve;
  std::vector<double> theta;
  std::vector<double> rho;
  double t = 0.0;

  double step() const { return dim == 2 ? 2.0 * std::numbers::pi / rho.size() : std::numbers::pi / rho.size(); }
};

/// Per-sample geometry of a FlowSurface.
struct FlowGeometry {
  std::vector<double> d1, d2;       // rho', rho''
  std::vector<double> curvature;    // H, mean of principal curvatures
  std::vector<double> weight;       // d sigma per sample
};

struct FlowRecord {
  double t = 0.0;
  double area = 0.0;
  std::vector<double> up;  // U_p for each p of the trace
  double willmore_n = 0.0;
  double anisotropy = 1.0;  // max rho / min rho
  double min_curvature = 0.0;
  double mean_radius = 0.0;
};

struct FlowTrace {
  int dim = 0;
  std::string body_descriptor;
  double dt = 0.0;
  int samples = 0;
  std::vector<double> p_list;
  std::vector<FlowRecord> records;
  FlowSurface final_surface;
  long long substeps = 0;

  std::size_t p_index(double p) const {
    for (std::size_t k = 0; k < p_list.size(); ++k)
      if (std::abs(p_list[k] - p) < 1e-12) return k;
    throw InvalidArgument("flow trace has no U_p column for p = " + std::to_string(p));
  }
};

namespace detail {

inline double ghost(const std::vector<double>& r, long i, bool periodic) {
  const long n = static_cast<long>(r.size());
  if (periodic) return r[static_cast<std::size_t>(((i % n) + n) % n)];
  if (i < 0) return r[static_cast<std::size_t>(-i - 1)];
  if (i >= n) return r[static_cast<std::size_t>(2 * n - i - 1)];
  return r[static_cast<std::size_t>(i)];
}

inline FlowGeometry flow_geometry(const FlowSurface& s) {
  const bool periodic = s.dim == 2;
  const std::size_t n = s.rho.size();
  const double h = s.step();
  FlowGeometry g;
  g.d1.resize(n);
  g.d2.resize(n);
  g.curvature.resize(n);
  g.weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long k = static_cast<long>(i);
    const double m2 = ghost(s.rho, k - 2, periodic), m1 = ghost(s.rho, k - 1, periodic), c = s.rho[i],
                 p1 = ghost(s.rho, k + 1, periodic), p2 = ghost(s.rho, k + 2, periodic);
    const double r1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    const double r2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    const double q = std::sqrt(c * c + r1 * r1);
    const double kappa = (c * c + 2.0 * r1 * r1 - c * r2) / (q * q * q);
    g.d1[i] = r1;
    g.d2[i] = r2;
    if (s.dim == 2) {
      g.curvature[i] = kappa;
      g.weight[i] = q * h;
    } else {
      const double th = s.theta[i];
      const double nx = (c * std::sin(th) - r1 * std::cos(th)) / q;
      g.curvature[i] = 0.5 * (kappa + nx / (c * std::sin(th)));
      // exact integral of sin over the cell
      g.weight[i] = 2.0 * std::numbers::pi * c * q * 2.0 * std::sin(th) * std::sin(0.5 * h);
    }
  }
  return g;
}

inline void check_axisymmetric(const Body& body) {
  for (int k = 1; k < 16; ++k) {
    const double th = std::numbers::pi * k / 16.0;
    const double ref = body.radial_distance(Point{{std::sin(th), 0.0, std::cos(th)}});
    for (int j = 1; j < 8; ++j) {
      const double ph = 2.0 * std::numbers::pi * j / 8.0;
      const double r = body.radial_distance(Point{{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)}});
      if (std::abs(r - ref) > 1e-9 * ref)
        throw InvalidArgument("flow: body " + body.descriptor() + " is not axisymmetric about the z axis");
    }
  }
}

/// Integral of g over the surface. For n = 3 each cell integrates the
/// quadratic Taylor model of g rho q against sin(theta) exactly.
inline double surface_integral(const FlowSurface& s, const FlowGeometry& g, const std::vector<double>& values) {
  const std::size_t n = s.rho.size();
  double sum = 0.0;
  if (s.dim == 2) {
    for (std::size_t i = 0; i < n; ++i) sum += values[i] * g.weight[i];
    return sum;
  }
  const double h = s.step(), a = 0.5 * h;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = values[i] * s.rho[i] * std::sqrt(s.rho[i] * s.rho[i] + g.d1[i] * g.d1[i]);
  const double m1 = 2.0 * (std::sin(a) - a * std::cos(a));
  const double m2 = 2.0 * ((a * a - 2.0) * std::sin(a) + 2.0 * a * std::cos(a));
  for (std::size_t i = 0; i < n; ++i) {
    const long k = static_cast<long>(i);
    const double fm2 = ghost(f, k - 2, false), fm1 = ghost(f, k - 1, false), fp1 = ghost(f, k + 1, false),
                 fp2 = ghost(f, k + 2, false);
    const double d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    const double d2 = (-fm2 + 16.0 * fm1 - 30.0 * f[i] + 16.0 * fp1 - fp2) / (12.0 * h * h);
    const double th = s.theta[i];
    sum += f[i] * 2.0 * std::sin(th) * std::sin(a) + d1 * std::cos(th) * m1 + 0.5 * d2 * std::sin(th) * m2;
  }
  return 2.0 * std::numbers::pi * sum;
}

inline FlowRecord flow_record(const FlowSurface& s, const FlowGeometry& g, const std::vector<double>& p_list) {
  const int n = s.dim;
  const double sigma = unit_sphere_area(n);
  const std::size_t count = s.rho.size();
  FlowRecord r;
  r.t = s.t;
  std::vector<double> v(count, 1.0);
  r.area = surface_integral(s, g, v);
  for (std::size_t i = 0; i < count; ++i) v[i] = std::pow(g.curvature[i], n - 1);
  r.willmore_n = surface_integral(s, g, v) / sigma;
  for (const double p : p_list) {
    for (std::size_t i = 0; i < count; ++i) v[i] = std::pow(g.curvature[i], p - 1.0);
    r.up.push_back(std::pow(n - 1.0, p - 1.0) * surface_integral(s, g, v) / sigma);
  }
  r.min_curvature = *std::min_element(g.curvature.begin(), g.curvature.end());
  const auto [lo, hi] = std::minmax_element(s.rho.begin(), s.rho.end());
  r.anisotropy = *hi / *lo;
  r.mean_radius = std::pow(r.area / sigma, 1.0 / (n - 1));
  return r;
}

}  // namespace detail

/// Samples the boundary of `body` (radial about its center) on the flow grid.
inline FlowSurface flow_surface(const Body& body, int samples = 0) {
  const int n = body.dim();
  if (n != 2 && n != 3) throw InvalidArgument("flow: only planar curves and axisymmetric surfaces are supported");
  if (n == 3) detail::check_axisymmetric(body);
  FlowSurface s;
  s.dim = n;
  s.symmetry = n == 2 ? FlowSymmetry::planar_curve : FlowSymmetry::axisymmetric_surface;
  const int count = samples > 0 ? samples : (n == 2 ? 64 : 48);
  if (count < 8) throw InvalidArgument("flow: need at least 8 angular samples");
  s.rho.resize(static_cast<std::size_t>(count));
  s.theta.resize(static_cast<std::size_t>(count));
  const double h = (n == 2 ? 2.0 : 1.0) * std::numbers::pi / count;
  for (int i = 0; i < count; ++i) {
    const double th = (i + 0.5) * h;
    s.theta[static_cast<std::size_t>(i)] = th;
    const Point dir = n == 2 ? Point{{std::cos(th), std::sin(th)}} : Point{{std::sin(th), 0.0, std::cos(th)}};
    s.rho[static_cast<std::size_t>(i)] = body.radial_distance(dir);
  }
  return s;
}

/// Largest stable explicit step for the current surface.
inline double flow_stable_step(const FlowSurface& s, const FlowGeometry& g, double cfl) {
  double m = 1e300;
  for (std::size_t i = 0; i < s.rho.size(); ++i)
    m = std::min(m, g.curvature[i] * g.curvature[i] * (s.rho[i] * s.rho[i] + g.d1[i] * g.d1[i]));
  return cfl * s.step() * s.step() * (s.dim - 1) * (s.dim - 1) * m;
}

/// Integrates d rho/dt = sqrt(rho^2 + rho'^2) / ((n - 1) rho H) by explicit Euler up to time T.
inline FlowTrace evolve(const Body& body, double T, const std::vector<double>& p_list, const FlowConfig& cfg = {}) {
  if (!(cfg.dt > 0.0) || !(T >= 0.0)) throw InvalidArgument("flow: need dt > 0 and T >= 0");
  const int n = body.dim();
  for (const double p : p_list)
    if (!(p > 1.0 && p <= n)) throw InvalidArgument("flow: U_p needs 1 < p <= n, got p = " + std::to_string(p));
  FlowTrace trace;
  trace.dim = n;
  trace.body_descriptor = body.descriptor();
  trace.dt = cfg.dt;
  trace.p_list = p_list;
  FlowSurface s = flow_surface(body, cfg.samples);
  trace.samples = static_cast<int>(s.rho.size());

  auto checked_geometry = [&](const FlowSurface& surf) {
    auto g = detail::flow_geometry(surf);
    for (std::size_t i = 0; i < surf.rho.size(); ++i) {
      if (!(surf.rho[i] > 0.0)) throw NumericalError("flow: star-shapedness lost at t = " + std::to_string(surf.t));
      if (!(surf.rho[i] < cfg.max_radius)) throw NumericalError("flow: radius exceeded the configured bound");
      if (!(g.curvature[i] > 0.0))
        throw NumericalError("flow: non-positive mean curvature at t = " + std::to_string(surf.t));
    }
    return g;
  };

  FlowGeometry g = checked_geometry(s);
  trace.records.push_back(detail::flow_record(s, g, p_list));
  const long steps = std::lround(T / cfg.dt);
  std::vector<double> speed(s.rho.size());
  for (long k = 1; k <= steps; ++k) {
    const double t_next = k * cfg.dt;
    while (s.t < t_next - 1e-12 * cfg.dt) {
      const double remaining = t_next - s.t;
      const double stable = flow_stable_step(s, g, cfg.cfl);
      int m = static_cast<int>(std::ceil(remaining / stable - 1e-9));
      if (m > 1 && !cfg.substep)
        throw NumericalError("flow: dt " + std::to_string(cfg.dt) + " exceeds the stability bound " + std::to_string(stable));
      m = std::max(m, 1);
      if (m > cfg.max_substeps) throw NumericalError("flow: stability bound requires more than max_substeps substeps");
      const double tau = remaining / m;
      for (std::size_t i = 0; i < s.rho.size(); ++i)
        speed[i] = std::sqrt(s.rho[i] * s.rho[i] + g.d1[i] * g.d1[i]) / ((n - 1) * s.rho[i] * g.curvature[i]);
      for (std::size_t i = 0; i < s.rho.size(); ++i) s.rho[i] += tau * speed[i];
      s.t = m == 1 ? t_next : s.t + tau;
      ++trace.substeps;
      g = checked_geometry(s);
    }
    if (k % cfg.record_every == 0 || k == steps) trace.records.push_back(detail::flow_record(s, g, p_list));
  }
  for (std::size_t k = 1; k < trace.records.size(); ++k)
    if (!(trace.records[k].area > trace.records[k - 1].area)) throw NumericalError("flow: area failed to increase");
  trace.final_surface = s;
  return trace;
}

/// max_t |area(t) - e^t area(0)| / (e^t area(0)).
inline double area_growth_check(const FlowTrace& trace) {
  double dev = 0.0;
  const double a0 = trace.records.front().area;
  for (const auto& r : trace.records) dev = std::max(dev, std::abs(r.area - std::exp(r.t) * a0) / (std::exp(r.t) * a0));
  return dev;
}

/// max_t |mean radius(t) - r0 e^{t/(n-1)}| / (r0 e^{t/(n-1)}) with mean radius (area/sigma)^{1/(n-1)}.
inline double radius_growth_check(const FlowTrace& trace) {
  double dev = 0.0;
  const double r0 = trace.records.front().mean_radius;
  for (const auto& r : trace.records) {
    const double e = r0 * std::exp(r.t / (trace.dim - 1));
    dev = std::max(dev, std::abs(r.mean_radius - e) / e);
  }
  return dev;
}

struct UpGrowthCheck {
  double p = 0.0;
  double up0 = 0.0;
  double min_slack = 0.0;  // min_t U_p(0) e^{t(n-p)/(n-1)} - U_p(t)
  double tol = 1e-2;
  bool pass = false;
};

inline UpGrowthCheck up_growth_check(const FlowTrace& trace, double p, double tol = 1e-2) {
  const int n = trace.dim;
  if (n != 3) throw InvalidArgument("up_growth_check: needs an n = 3 trace");
  if (!(p >= 2.0 && p < n)) throw InvalidArgument("up_growth_check: p must lie in [2, n)");
  const std::size_t k = trace.p_index(p);
  UpGrowthCheck c;
  c.p = p;
  c.tol = tol;
  c.up0 = trace.records.front().up[k];
  c.min_slack = 1e300;
  for (const auto& r : trace.records)
    c.min_slack = std::min(c.min_slack, c.up0 * std::exp(r.t * (n - p) / (n - 1.0)) - r.up[k]);
  c.pass = c.min_slack >= -tol * c.up0;
  return c;
}

struct FlowCapacityBound {
  double p = 0.0;
  double integral = 0.0;        // int_0^infty U_p^{1/(1-p)} dt including the tail
  double tail = 0.0;
  double per_sigma = 0.0;       // bound on cap_p / sigma_{n-1}
  double normalized = 0.0;      // bound on cap_p / (((p-1)/(n-p))^{1-p} sigma_{n-1})
  double capacity = 0.0;        // bound on cap_p
};

/// Upper bound on cap_p from the trace; the tail beyond the last record uses
/// the exponential growth bound and must change the integral by < max_tail.
inline FlowCapacityBound flow_capacity_bound(const FlowTrace& trace, double p, double max_tail = 1e-2) {
  const int n = trace.dim;
  check_p_range(n, p);
  const std::size_t k = trace.p_index(p);
  FlowCapacityBound b;
  b.p = p;
  const double e = 1.0 / (1.0 - p);
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const auto& a = trace.records[i - 1];
    const auto& c = trace.records[i];
    b.integral += 0.5 * (c.t - a.t) * (std::pow(a.up[k], e) + std::pow(c.up[k], e));
  }
  b.tail = std::pow(trace.records.back().up[k], e) * (n - 1.0) * (p - 1.0) / (n - p);
  if (!(b.tail < max_tail * (b.integral + b.tail)))
    throw NumericalError("flow_capacity_bound: trace too short, tail is " +
                         std::to_string(b.tail / (b.integral + b.tail) * 100.0) + "% of the integral");
  b.integral += b.tail;
  b.per_sigma = std::pow(b.integral, 1.0 - p);
  b.normalized = b.per_sigma / capacity_constant(n, p);
  b.capacity = b.per_sigma * unit_sphere_area(n);
  return b;
}

/// Flow time after which the tail of the capacity integral drops below `fraction`.
inline double flow_time_for_tail(int n, double p, double fraction = 1e-2) {
  check_p_range(n, p);
  const double rate = (n - p) / ((n - 1.0) * (p - 1.0));
  return std::log(1.0 / fraction) / rate;
}

/// CSV columns: t, area, U_p<p>..., willmore_n.
inline void write_flow_csv(std::ostream& out, const FlowTrace& trace) {
  out << "t,area";
  for (const double p : trace.p_list) out << ",U_p" << format_number(p);
  out << ",willmore_n\n";
  for (const auto& r : trace.records) {
    out << format_number(r.t) << ',' << format_number(r.area);
    for (const double u : r.up) out << ',' << format_number(u);
    out << ',' << format_number(r.willmore_n) << '\n';
  }
}

}  // namespace capgeo
