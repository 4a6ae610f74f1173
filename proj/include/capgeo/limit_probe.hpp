// Extrapolation of p-capacities toward p = 1, where the capacity of a convex
// body becomes its surface area.
#pragma once

#include "capgeo/capacity_solver.hpp"
#include "capgeo/functionals.hpp"

#include <cmath>
#include <vector>

namespace capgeo {

struct P1LimitProbe {
  std::vector<double> p;
  std::vector<double> capacity;  // cap_p estimates
  std::vector<double> stripped;  // cap_p ((p-1)/(n-p))^{p-1}
  double extrapolated = 0.0;     // stripped value extrapolated linearly to p = 1
  double slope = 0.0;
  double residual = 0.0;         // max relative misfit of the linear fit
  double area = 0.0;
  double relative_gap = 0.0;     // extrapolated / area - 1
};

struct P1ProbeConfig {
  SolverConfig solver;
  int mesh_resolution = 128;
  double max_residual = 0.02;
};

/// The capacity itself carries the factor ((n-p)/(p-1))^{p-1}, which tends to 1
/// with an infinite slope at p = 1; it is divided out before the linear fit.
inline P1LimitProbe p1_limit_probe(const Body& body, const std::vector<double>& p_sequence, const P1ProbeConfig& cfg = {}) {
  if (!body.convex_kind()) throw InvalidArgument("p1_limit_probe: convex body required");
  if (p_sequence.size() < 2) throw InvalidArgument("p1_limit_probe: need at least two exponents");
  for (std::size_t i = 0; i < p_sequence.size(); ++i) {
    const double p = p_sequence[i];
    if (!(p >= 1.05 && p < 1.5)) throw InvalidArgument("p1_limit_probe: exponents must lie in [1.05, 1.5)");
    if (i > 0 && !(p < p_sequence[i - 1])) throw InvalidArgument("p1_limit_probe: sequence must decrease");
  }
  const int n = body.dim();
  P1LimitProbe out;
  for (const double p : p_sequence) {
    const auto est = solve_p_capacity(body, p, cfg.solver);
    out.p.push_back(p);
    out.capacity.push_back(est.value);
    out.stripped.push_back(est.value * std::pow((p - 1.0) / (n - p), p - 1.0));
  }
  // least squares line in x = p - 1
  const auto m = static_cast<double>(out.p.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < out.p.size(); ++i) {
    const double x = out.p[i] - 1.0, y = out.stripped[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.extrapolated = (sy - out.slope * sx) / m;
  for (std::size_t i = 0; i < out.p.size(); ++i) {
    const double fit = out.extrapolated + out.slope * (out.p[i] - 1.0);
    out.residual = std::max(out.residual, std::abs(out.stripped[i] / fit - 1.0));
  }
  out.area = functionals(mesh_body(body, cfg.mesh_resolution), {1.0}).area;
  out.relative_gap = out.extrapolated / out.area - 1.0;
  if (out.residual > cfg.max_residual)
    throw NumericalError("p1_limit_probe: linear extrapolation residual " + format_number(out.residual) + " exceeds " +
                         format_number(cfg.max_residual));
  return out;
}

}  // namespace capgeo
