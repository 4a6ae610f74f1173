// Evaluation of the capacity / area / volume / Willmore inequalities on a body.
//
// Every report carries left and right values, slack = right - left (1 - lhs
// for the capacity-area-volume inequality), and a tolerance
//
//   tol = max(2 * w, 1e-2 * scale),  w = slack change across the capacity bracket,
//
// where scale is |right|. Capacity enters with the end of its bracket that is
// unfavorable for the inequality. pass <=> slack >= -tol.
#pragma once

#include "capgeo/capacity_formulas.hpp"
#include "capgeo/capacity_solver.hpp"
#include "capgeo/functionals.hpp"
#include "capgeo/imcf_flow.hpp"
#include "capgeo/mesh.hpp"
#include "capgeo/riesz.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace capgeo {

/// Capacity value with its bracket, as consumed by the evaluators.
struct CapacityBracket {
  double p = 0.0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string source;

  static CapacityBracket from(const PCapacityEstimate& e) {
    const auto& f = e.solves.back();
    std::string src = "grid " + std::to_string(f.grid);
    if (e.extrapolated) src += " with grid " + std::to_string(e.solves.front().grid) + " extrapolation";
    src += ", R=" + format_number(e.box_radius);
    return {e.p, e.value, e.lower, e.upper, src};
  }

  nlohmann::json to_json() const {
    return {{"p", p}, {"value", value}, {"lower", lower}, {"upper", upper}, {"source", source}};
  }
};

struct InequalityReport {
  std::string body;
  int n = 0;
  std::optional<double> p;
  std::optional<double> q;
  std::string id;
  bool asserted = true;         // false for conjectures and exploratory scans
  bool equality_case = false;   // body is a ball and the inequality is tight on balls
  double left = 0.0;
  double right = 0.0;
  std::optional<double> middle;  // ratio in two-sided bounds
  double slack = 0.0;
  double scale = 1.0;
  double tol = 0.0;
  bool pass = false;
  bool strict = false;  // slack > 3 tol
  std::string note;
  nlohmann::json inputs = nlohmann::json::object();

  bool operator==(const InequalityReport&) const = default;
};

inline void to_json(nlohmann::json& j, const InequalityReport& r) {
  j = nlohmann::json{{"body", r.body},   {"n", r.n},         {"id", r.id},       {"asserted", r.asserted},
                     {"equality_case", r.equality_case},     {"left", r.left},   {"right", r.right},
                     {"slack", r.slack}, {"scale", r.scale}, {"tol", r.tol},     {"pass", r.pass},
                     {"strict", r.strict}, {"note", r.note}, {"inputs", r.inputs}};
  j["p"] = r.p ? nlohmann::json(*r.p) : nlohmann::json(nullptr);
  j["q"] = r.q ? nlohmann::json(*r.q) : nlohmann::json(nullptr);
  j["middle"] = r.middle ? nlohmann::json(*r.middle) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, InequalityReport& r) {
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  r.body = j.at("body").get<std::string>();
  r.n = j.at("n").get<int>();
  r.p = opt("p");
  r.q = opt("q");
  r.id = j.at("id").get<std::string>();
  r.asserted = j.at("asserted").get<bool>();
  r.equality_case = j.at("equality_case").get<bool>();
  r.left = j.at("left").get<double>();
  r.right = j.at("right").get<double>();
  r.middle = opt("middle");
  r.slack = j.at("slack").get<double>();
  r.scale = j.at("scale").get<double>();
  r.tol = j.at("tol").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.strict = j.at("strict").get<bool>();
  r.note = j.at("note").get<std::string>();
  r.inputs = j.at("inputs");
}

/// Constants around the convex-body capacity/area problem in R^3.
struct PolyaSzegoConstants {
  double conjectured = 4.0 * std::sqrt(2.0 / std::numbers::pi);  // disk extremal
  double improved = 1.5 * std::sqrt(std::numbers::pi);
  double classical = 4.0 / std::sqrt(std::numbers::pi);
  double conjectured_minus_improved = 0.0;
  double improved_minus_classical = 0.0;
  bool ordered = false;
};

inline PolyaSzegoConstants polya_szego_constants() {
  PolyaSzegoConstants c;
  c.conjectured_minus_improved = c.conjectured - c.improved;
  c.improved_minus_classical = c.improved - c.classical;
  c.ordered = c.conjectured > c.improved && c.improved > c.classical;
  return c;
}

inline nlohmann::json to_json(const PolyaSzegoConstants& c) {
  return {{"conjectured", c.conjectured},
          {"improved", c.improved},
          {"classical", c.classical},
          {"conjectured_minus_improved", c.conjectured_minus_improved},
          {"improved_minus_classical", c.improved_minus_classical},
          {"ordered", c.ordered}};
}

struct RieszData {
  int samples = 0;
  double max_potential = 0.0;  // max over samples of S(x)
  double min_potential = 0.0;
  double energy = 0.0;         // int int |x - y|^{2-n}
};

struct HarnessConfig {
  SolverConfig solver;
  int mesh_resolution = 192;
  double q = 2.0;  // exponent of the second Willmore branches
  bool riesz = true;
  int riesz_samples = 64;
  RieszConfig riesz_quadrature;
  bool flow = true;
  FlowConfig flow_config;
  double max_flow_time = 40.0;  // flow bounds are skipped for p needing a longer trace
};

/// Everything the evaluators consume for one body.
struct Ingredients {
  std::string body;
  int n = 0;
  bool convex = false;
  bool ball = false;
  bool axisymmetric = false;
  int mesh_resolution = 0;
  double min_mean_curvature = 0.0;
  GeometricFunctionals geo;
  std::vector<CapacityBracket> capacities;
  std::optional<RieszData> riesz;
  std::vector<FlowCapacityBound> flow_bounds;

  const CapacityBracket& capacity(double p) const {
    for (const auto& c : capacities)
      if (std::abs(c.p - p) < 1e-12) return c;
    throw InvalidArgument("no capacity estimate for p = " + std::to_string(p) + " on " + body);
  }
  bool has_capacity(double p) const {
    for (const auto& c : capacities)
      if (std::abs(c.p - p) < 1e-12) return true;
    return false;
  }
  const FlowCapacityBound* flow_bound(double p) const {
    for (const auto& b : flow_bounds)
      if (std::abs(b.p - p) < 1e-12) return &b;
    return nullptr;
  }
  double area_ratio() const { return geo.area / unit_sphere_area(n); }
  nlohmann::json mesh_json() const {
    return {{"resolution", mesh_resolution}, {"area", geo.area}, {"volume", geo.volume}};
  }
};

namespace detail {

inline bool is_axisymmetric_z(const Body& b) {
  if (b.dim() != 3 || b.is_rotated()) return false;
  if (b.kind() == BodyKind::ball) return true;
  if (b.kind() == BodyKind::ellipsoid) return std::abs(b.semi_axes()[0] - b.semi_axes()[1]) < 1e-12 * b.semi_axes()[0];
  if (b.kind() == BodyKind::radial_graph) return b.radial_function()->axisymmetric();
  return false;
}

inline bool is_ball(const Body& b) {
  if (b.kind() == BodyKind::ball) return true;
  if (b.kind() == BodyKind::ellipsoid) return b.semi_axes().maxCoeff() - b.semi_axes().minCoeff() < 1e-12 * b.semi_axes().maxCoeff();
  return false;
}

inline std::vector<double> willmore_exponents(int n, const std::vector<double>& p_list, double q) {
  std::vector<double> e{1.0, static_cast<double>(n)};
  if (n >= 2) e.push_back(2.0);
  if (q >= 1.0 && q <= n) e.push_back(q);
  for (const double p : p_list)
    if (p >= 1.0 && p <= n) e.push_back(p);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), e.end());
  return e;
}

struct Sides {
  double left = 0.0;
  double right = 0.0;
};

enum class CapEnd { lower, upper, none };

/// Fills slack/tol/pass from a side evaluator at the conservative capacity end.
inline InequalityReport finish(InequalityReport r, const std::function<Sides(double)>& sides, const CapacityBracket* cap,
                               CapEnd end, bool unit_scale = false) {
  const double c_use = cap ? (end == CapEnd::lower ? cap->lower : end == CapEnd::upper ? cap->upper : cap->value) : 0.0;
  const double c_other = cap ? (end == CapEnd::lower ? cap->upper : end == CapEnd::upper ? cap->lower : cap->value) : 0.0;
  const Sides s = sides(c_use);
  const Sides o = sides(c_other);
  r.left = s.left;
  r.right = s.right;
  if (r.slack == 0.0) r.slack = s.right - s.left;
  const double width = std::abs((o.right - o.left) - (s.right - s.left));
  r.scale = unit_scale ? 1.0 : std::abs(s.right);
  r.tol = std::max(2.0 * width, 1e-2 * r.scale);
  r.pass = r.slack >= -r.tol;
  r.strict = r.slack > 3.0 * r.tol;
  if (cap) {
    r.inputs["capacity"] = cap->to_json();
    r.inputs["capacity"]["end_used"] = end == CapEnd::lower ? "lower" : end == CapEnd::upper ? "upper" : "value";
  }
  return r;
}

inline InequalityReport base_report(const Ingredients& ing, const std::string& id, std::optional<double> p = std::nullopt,
                                    std::optional<double> q = std::nullopt) {
  InequalityReport r;
  r.body = ing.body;
  r.n = ing.n;
  r.p = p;
  r.q = q;
  r.id = id;
  r.inputs["mesh"] = ing.mesh_json();
  return r;
}

inline double norm_cap(int n, double p, double cap) { return normalized_capacity(n, p, cap); }

}  // namespace detail

/// Computes mesh functionals, capacity brackets for every p (and p = 2 when n = 3),
/// the single-layer data (n = 3) and flow bounds (axisymmetric n = 3 bodies).
inline Ingredients gather_ingredients(const Body& body, const std::vector<double>& p_list, const HarnessConfig& cfg = {}) {
  Ingredients ing;
  ing.body = body.descriptor();
  ing.n = body.dim();
  ing.convex = body.convex_kind();
  ing.ball = detail::is_ball(body);
  ing.axisymmetric = detail::is_axisymmetric_z(body);
  ing.mesh_resolution = cfg.mesh_resolution;
  const SurfaceMesh mesh = mesh_body(body, cfg.mesh_resolution);
  ing.min_mean_curvature = mesh.min_curvature();
  ing.geo = functionals(mesh, detail::willmore_exponents(ing.n, p_list, cfg.q));
  std::vector<double> ps = p_list;
  if (ing.n == 3 && std::none_of(ps.begin(), ps.end(), [](double p) { return std::abs(p - 2.0) < 1e-12; })) ps.push_back(2.0);
  for (const double p : ps) ing.capacities.push_back(CapacityBracket::from(solve_p_capacity(body, p, cfg.solver)));
  if (ing.n == 3 && cfg.riesz) {
    RieszData d;
    d.samples = cfg.riesz_samples;
    d.max_potential = -1e300;
    d.min_potential = 1e300;
    for (const auto& s : single_layer_samples(body, cfg.riesz_samples, cfg.riesz_quadrature)) {
      d.max_potential = std::max(d.max_potential, s.value);
      d.min_potential = std::min(d.min_potential, s.value);
    }
    d.energy = single_layer_energy(body, cfg.riesz_quadrature);
    ing.riesz = d;
  }
  if (ing.n == 3 && cfg.flow && ing.axisymmetric && ing.min_mean_curvature > 0.0) {
    for (const double p : ps) {
      const double T = flow_time_for_tail(ing.n, p, 5e-3);
      if (T > cfg.max_flow_time) continue;
      const FlowTrace trace = evolve(body.translated(-body.center()), T, {p}, cfg.flow_config);
      ing.flow_bounds.push_back(flow_capacity_bound(trace, p));
    }
  }
  return ing;
}

/// 1 - [n(p-1)/(p(n-1)) (A*/C*)^{(n-p)/(p-1)} + (n-p)/(p(n-1)) (V*/A*)^n] >= 0.
inline InequalityReport eval_capacity_area_volume(const Ingredients& ing, double p) {
  const int n = ing.n;
  const auto& cap = ing.capacity(p);
  auto r = detail::base_report(ing, "capacity_area_volume", p);
  r.equality_case = ing.ball;
  const double a = ing.geo.normalized_area, v = ing.geo.normalized_volume;
  const double w1 = n * (p - 1.0) / (p * (n - 1.0)), w2 = (n - p) / (p * (n - 1.0));
  auto sides = [&](double c) {
    const double cs = capacity_radius(n, p, c);
    return detail::Sides{w1 * std::pow(a / cs, (n - p) / (p - 1.0)) + w2 * std::pow(v / a, n), 1.0};
  };
  return detail::finish(r, sides, &cap, detail::CapEnd::lower, true);
}

/// (area/sigma)^{(n-p)/(n-1)} <= normalized cap_p (p(n-1)/(n(p-1)))^{p-1}.
inline InequalityReport eval_area_capacity(const Ingredients& ing, double p) {
  const int n = ing.n;
  const auto& cap = ing.capacity(p);
  auto r = detail::base_report(ing, "area_capacity", p);
  const double lhs = std::pow(ing.area_ratio(), (n - p) / (n - 1.0));
  const double k = std::pow(p * (n - 1.0) / (n * (p - 1.0)), p - 1.0);
  auto sides = [&](double c) { return detail::Sides{lhs, detail::norm_cap(n, p, c) * k}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::lower);
}

/// cap_2 >= c sqrt(area) in R^3 with c = 3 sqrt(pi)/2 (proved), 4/sqrt(pi)
/// (classical) or 4 sqrt(2/pi) (conjectured; reported, not asserted).
inline InequalityReport eval_capacity_sqrt_area(const Ingredients& ing, const std::string& which = "improved") {
  if (ing.n != 3) throw InvalidArgument("capacity_sqrt_area: needs n = 3");
  const auto k = polya_szego_constants();
  double c = k.improved;
  std::string id = "capacity_sqrt_area";
  if (which == "classical") {
    c = k.classical;
    id = "polya_szego_constant";
  } else if (which == "conjectured") {
    c = k.conjectured;
    id = "polya_szego_conjecture";
  } else if (which != "improved") {
    throw InvalidArgument("capacity_sqrt_area: unknown constant " + which);
  }
  const auto& cap = ing.capacity(2.0);
  auto r = detail::base_report(ing, id, 2.0);
  r.asserted = which != "conjectured";
  r.inputs["constant"] = c;
  const double lhs = c * std::sqrt(ing.geo.area);
  auto sides = [&](double cv) { return detail::Sides{lhs, cv}; };
  r = detail::finish(r, sides, &cap, detail::CapEnd::lower);
  r.middle = cap.value / lhs;
  if (!r.asserted) r.note = "open conjecture, reported only";
  return r;
}

/// 2 <= p < n: normalized cap_p <= willmore_p.
/// 1 < p <= 2 <= q < n: normalized cap_p <= willmore_q^{(p-1)/(q-1)} (area/sigma)^{(q-p)/(q-1)}.
inline InequalityReport eval_capacity_willmore(const Ingredients& ing, double p, std::optional<double> q = std::nullopt) {
  const int n = ing.n;
  const auto& cap = ing.capacity(p);
  if (!q) {
    if (!(p >= 2.0 && p < n)) throw InvalidArgument("capacity_willmore: first branch needs 2 <= p < n");
    auto r = detail::base_report(ing, "capacity_willmore_p", p);
    r.equality_case = ing.ball;
    const double w = ing.geo.willmore_at(p);
    auto sides = [&](double c) { return detail::Sides{detail::norm_cap(n, p, c), w}; };
    return detail::finish(r, sides, &cap, detail::CapEnd::upper);
  }
  if (!(p > 1.0 && p <= 2.0 && *q >= 2.0 && *q < n))
    throw InvalidArgument("capacity_willmore: second branch needs 1 < p <= 2 <= q < n");
  auto r = detail::base_report(ing, "capacity_willmore_q", p, q);
  const double rhs = std::pow(ing.geo.willmore_at(*q), (p - 1.0) / (*q - 1.0)) * std::pow(ing.area_ratio(), (*q - p) / (*q - 1.0));
  auto sides = [&](double c) { return detail::Sides{detail::norm_cap(n, p, c), rhs}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::upper);
}

/// normalized cap_p <= (area/sigma)^{(n-p)/(n-1)} willmore_n^{(p-1)/(n-1)}.
inline InequalityReport eval_capacity_area_willmore(const Ingredients& ing, double p) {
  const int n = ing.n;
  const auto& cap = ing.capacity(p);
  auto r = detail::base_report(ing, "capacity_area_willmore", p);
  r.equality_case = ing.ball;
  const double rhs = std::pow(ing.area_ratio(), (n - p) / (n - 1.0)) * std::pow(ing.geo.willmore_at(n), (p - 1.0) / (n - 1.0));
  auto sides = [&](double c) { return detail::Sides{detail::norm_cap(n, p, c), rhs}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::upper);
}

/// (n(p-1)/(p(n-1)))^{p-1} <= normalized cap_p / (area/sigma)^{(n-p)/(n-1)} <= willmore_n^{(p-1)/(n-1)}.
/// left and right are the two bounds, middle the ratio; slack is the smaller gap,
/// each gap taken at its unfavorable capacity end.
inline InequalityReport eval_two_sided_bound(const Ingredients& ing, double p) {
  const int n = ing.n;
  const auto& cap = ing.capacity(p);
  auto r = detail::base_report(ing, "two_sided_bound", p);
  r.equality_case = ing.ball;
  const double lo = std::pow(n * (p - 1.0) / (p * (n - 1.0)), p - 1.0);
  const double hi = std::pow(ing.geo.willmore_at(n), (p - 1.0) / (n - 1.0));
  const double area_term = std::pow(ing.area_ratio(), (n - p) / (n - 1.0));
  auto ratio = [&](double c) { return detail::norm_cap(n, p, c) / area_term; };
  const double gap_lo = ratio(cap.lower) - lo, gap_hi = hi - ratio(cap.upper);
  const double width = ratio(cap.upper) - ratio(cap.lower);
  r.left = lo;
  r.right = hi;
  r.middle = ratio(cap.value);
  r.slack = std::min(gap_lo, gap_hi);
  r.scale = std::abs(hi);
  r.tol = std::max(2.0 * width, 1e-2 * r.scale);
  r.pass = r.slack >= -r.tol;
  r.strict = r.slack > 3.0 * r.tol;
  r.inputs["capacity"] = cap.to_json();
  r.inputs["capacity"]["end_used"] = "lower for the lower gap, upper for the upper gap";
  r.inputs["lower_gap"] = gap_lo;
  r.inputs["upper_gap"] = gap_hi;
  r.note = ing.ball ? "ball: upper gap closes, lower gap equals 1 - lower constant" : "";
  return r;
}

/// Endpoint behaviour of the two-sided bound: near p = 1 the ratio
/// normalized cap / (area/sigma)^{(n-p)/(n-1)} tends to 1; near p = n the
/// normalized capacity tends to 1. left = |quantity - 1|, right = window.
inline InequalityReport eval_endpoint_limit(const Ingredients& ing, double p, double window = 0.05) {
  const int n = ing.n;
  const auto& cap = ing.capacity(p);
  const bool near_one = p - 1.0 < n - p;
  auto r = detail::base_report(ing, "endpoint_limits", p);
  r.note = near_one ? "p near 1: normalized cap / normalized area term" : "p near n: normalized cap";
  const double area_term = near_one ? std::pow(ing.area_ratio(), (n - p) / (n - 1.0)) : 1.0;
  const double vlo = std::abs(detail::norm_cap(n, p, cap.lower) / area_term - 1.0);
  const double vhi = std::abs(detail::norm_cap(n, p, cap.upper) / area_term - 1.0);
  r.middle = detail::norm_cap(n, p, cap.value) / area_term;
  r.left = std::max(vlo, vhi);
  r.right = window;
  r.slack = window - r.left;
  r.scale = window;
  r.tol = std::max(2.0 * std::abs(vhi - vlo), 1e-2 * window);
  r.pass = r.slack >= -r.tol;
  r.strict = r.slack > 3.0 * r.tol;
  r.inputs["capacity"] = cap.to_json();
  r.inputs["capacity"]["end_used"] = "worse of lower and upper";
  return r;
}

/// Willmore inequality willmore_n >= 1; pinned tolerance 1e-3.
inline InequalityReport eval_willmore(const Ingredients& ing, double tol = 1e-3) {
  auto r = detail::base_report(ing, "willmore");
  r.equality_case = ing.ball;
  r.left = 1.0;
  r.right = ing.geo.willmore_at(ing.n);
  r.slack = r.right - r.left;
  r.scale = 1.0;
  r.tol = tol;
  r.pass = r.slack >= -tol;
  r.strict = r.slack > 3.0 * tol;
  r.note = std::abs(r.slack) <= tol ? "equality within tolerance" : "strict";
  return r;
}

/// V* <= A*.
inline InequalityReport eval_isoperimetric(const Ingredients& ing) {
  auto r = detail::base_report(ing, "isoperimetric");
  r.equality_case = ing.ball;
  auto sides = [&](double) { return detail::Sides{ing.geo.normalized_volume, ing.geo.normalized_area}; };
  return detail::finish(r, sides, nullptr, detail::CapEnd::none);
}

/// V* <= C*.
inline InequalityReport eval_isocapacitary(const Ingredients& ing, double p) {
  const auto& cap = ing.capacity(p);
  auto r = detail::base_report(ing, "isocapacitary", p);
  r.equality_case = ing.ball;
  auto sides = [&](double c) { return detail::Sides{ing.geo.normalized_volume, capacity_radius(ing.n, p, c)}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::lower);
}

/// (area/sigma)^{(n-2)/(n-1)} <= willmore_2.
inline InequalityReport eval_aleksandrov_fenchel(const Ingredients& ing) {
  const int n = ing.n;
  auto r = detail::base_report(ing, "aleksandrov_fenchel", 2.0);
  r.equality_case = ing.ball;
  auto sides = [&](double) { return detail::Sides{std::pow(ing.area_ratio(), (n - 2.0) / (n - 1.0)), ing.geo.willmore_at(2.0)}; };
  return detail::finish(r, sides, nullptr, detail::CapEnd::none);
}

/// 2 <= p < n: (area/sigma)^{(n-p)/(n-1)} <= willmore_p;
/// 1 < p <= 2 <= q < n: ... <= willmore_q^{(p-1)/(q-1)} (area/sigma)^{(q-p)/(q-1)}.
inline InequalityReport eval_p_aleksandrov_fenchel(const Ingredients& ing, double p, std::optional<double> q = std::nullopt) {
  const int n = ing.n;
  const double lhs = std::pow(ing.area_ratio(), (n - p) / (n - 1.0));
  double rhs = 0.0;
  if (!q) {
    if (!(p >= 2.0 && p < n)) throw InvalidArgument("p_aleksandrov_fenchel: first branch needs 2 <= p < n");
    rhs = ing.geo.willmore_at(p);
  } else {
    if (!(p > 1.0 && p <= 2.0 && *q >= 2.0 && *q < n))
      throw InvalidArgument("p_aleksandrov_fenchel: second branch needs 1 < p <= 2 <= q < n");
    rhs = std::pow(ing.geo.willmore_at(*q), (p - 1.0) / (*q - 1.0)) * std::pow(ing.area_ratio(), (*q - p) / (*q - 1.0));
  }
  auto r = detail::base_report(ing, "p_aleksandrov_fenchel", p, q);
  r.equality_case = ing.ball && !q;
  auto sides = [&](double) { return detail::Sides{lhs, rhs}; };
  return detail::finish(r, sides, nullptr, detail::CapEnd::none);
}

/// cap_2/((n-2) sigma) <= (area/sigma)^{(n-2)/(n-1)} willmore_n^{1/(n-1)}.
inline InequalityReport eval_capacity_log_convexity(const Ingredients& ing) {
  const int n = ing.n;
  if (n < 3) throw InvalidArgument("capacity_log_convexity: needs n >= 3");
  const auto& cap = ing.capacity(2.0);
  auto r = detail::base_report(ing, "capacity_log_convexity", 2.0);
  r.equality_case = ing.ball;
  const double sigma = unit_sphere_area(n);
  const double rhs = std::pow(ing.area_ratio(), (n - 2.0) / (n - 1.0)) * std::pow(ing.geo.willmore_at(n), 1.0 / (n - 1.0));
  auto sides = [&](double c) { return detail::Sides{c / ((n - 2.0) * sigma), rhs}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::upper);
}

inline const RieszData& riesz_data(const Ingredients& ing) {
  if (!ing.riesz) throw InvalidArgument("riesz data not computed for " + ing.body);
  return *ing.riesz;
}

/// max_x S(x) <= (n-1) (area/sigma)^{1/(n-1)}.
inline InequalityReport eval_riesz_potential(const Ingredients& ing) {
  const auto& d = riesz_data(ing);
  auto r = detail::base_report(ing, "riesz_potential_bound");
  r.inputs["riesz"] = {{"samples", d.samples}, {"max_potential", d.max_potential}, {"min_potential", d.min_potential}};
  auto sides = [&](double) { return detail::Sides{d.max_potential, (ing.n - 1.0) * ing.geo.normalized_area}; };
  return detail::finish(r, sides, nullptr, detail::CapEnd::none);
}

/// (area/sigma)^{(n-2)/(n-1)} <= (n-1) cap_2 / ((n-2) sigma).
inline InequalityReport eval_riesz_capacity(const Ingredients& ing) {
  const int n = ing.n;
  const auto& cap = ing.capacity(2.0);
  auto r = detail::base_report(ing, "riesz_capacity_bound", 2.0);
  const double lhs = std::pow(ing.area_ratio(), (n - 2.0) / (n - 1.0));
  auto sides = [&](double c) { return detail::Sides{lhs, (n - 1.0) * c / ((n - 2.0) * unit_sphere_area(n))}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::lower);
}

/// Exploratory: margin max_x S(x) - (area/sigma)^{1/(n-1)}; never asserted.
inline InequalityReport scan_riesz_conjecture(const Ingredients& ing) {
  const auto& d = riesz_data(ing);
  auto r = detail::base_report(ing, "riesz_conjecture_scan");
  r.asserted = false;
  r.equality_case = ing.ball;
  r.inputs["riesz"] = {{"samples", d.samples}, {"max_potential", d.max_potential}, {"min_potential", d.min_potential}};
  auto sides = [&](double) { return detail::Sides{d.max_potential, ing.geo.normalized_area}; };
  r = detail::finish(r, sides, nullptr, detail::CapEnd::none);
  r.note = std::string("conjecture, exploratory; margin ") + (r.slack >= 0.0 ? "non-negative" : "negative");
  return r;
}

/// (n-2) sigma / cap_2 <= int int |x-y|^{2-n} / area^2.
inline InequalityReport eval_riesz_energy(const Ingredients& ing) {
  const int n = ing.n;
  const auto& d = riesz_data(ing);
  const auto& cap = ing.capacity(2.0);
  auto r = detail::base_report(ing, "riesz_energy_bound", 2.0);
  r.equality_case = ing.ball;
  r.inputs["riesz"] = {{"energy", d.energy}};
  const double rhs = d.energy / (ing.geo.area * ing.geo.area);
  auto sides = [&](double c) { return detail::Sides{(n - 2.0) * unit_sphere_area(n) / c, rhs}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::lower);
}

/// Normalized capacity (lower end) <= flow upper bound.
inline InequalityReport eval_flow_capacity_bound(const Ingredients& ing, double p) {
  const auto* b = ing.flow_bound(p);
  if (!b) throw InvalidArgument("no flow bound for p = " + std::to_string(p) + " on " + ing.body);
  const auto& cap = ing.capacity(p);
  auto r = detail::base_report(ing, "flow_capacity_bound", p);
  r.equality_case = ing.ball;
  r.inputs["flow"] = {{"integral", b->integral}, {"tail", b->tail}, {"normalized", b->normalized}};
  auto sides = [&](double c) { return detail::Sides{detail::norm_cap(ing.n, p, c), b->normalized}; };
  return detail::finish(r, sides, &cap, detail::CapEnd::lower);
}

/// All reports for one body and a list of p values.
inline std::vector<InequalityReport> evaluate_all(const Ingredients& ing, const std::vector<double>& p_list, double q = 2.0) {
  const int n = ing.n;
  std::vector<InequalityReport> out;
  out.push_back(eval_isoperimetric(ing));
  if (ing.convex) out.push_back(eval_willmore(ing));
  if (n >= 3) out.push_back(eval_aleksandrov_fenchel(ing));
  for (const double p : p_list) {
    out.push_back(eval_isocapacitary(ing, p));
    if (ing.convex) {
      out.push_back(eval_capacity_area_volume(ing, p));
      out.push_back(eval_area_capacity(ing, p));
    }
    if (p >= 2.0) {
      out.push_back(eval_capacity_willmore(ing, p));
      if (n >= 3) out.push_back(eval_p_aleksandrov_fenchel(ing, p));
    } else if (q >= 2.0 && q < n) {
      out.push_back(eval_capacity_willmore(ing, p, q));
      out.push_back(eval_p_aleksandrov_fenchel(ing, p, q));
    }
    out.push_back(eval_capacity_area_willmore(ing, p));
    if (ing.convex) out.push_back(eval_two_sided_bound(ing, p));
    if (p - 1.0 <= 0.1 || n - p <= 0.1) out.push_back(eval_endpoint_limit(ing, p));
    if (ing.flow_bound(p)) out.push_back(eval_flow_capacity_bound(ing, p));
  }
  if (n == 3 && ing.has_capacity(2.0)) {
    out.push_back(eval_capacity_sqrt_area(ing, "improved"));
    out.push_back(eval_capacity_sqrt_area(ing, "classical"));
    out.push_back(eval_capacity_sqrt_area(ing, "conjectured"));
    out.push_back(eval_capacity_log_convexity(ing));
    if (ing.riesz) {
      out.push_back(eval_riesz_potential(ing));
      out.push_back(eval_riesz_capacity(ing));
      out.push_back(scan_riesz_conjecture(ing));
      out.push_back(eval_riesz_energy(ing));
    }
  }
  return out;
}

/// True when every asserted report passes.
inline bool all_asserted_pass(const std::vector<InequalityReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return !r.asserted || r.pass; });
}

/// Summary CSV columns: body,n,p,q,id,asserted,left,right,middle,slack,tol,pass,strict.
inline void write_report_csv_header(std::ostream& out) { out << "body,n,p,q,id,asserted,left,right,middle,slack,tol,pass,strict\n"; }

inline void write_report_csv_row(std::ostream& out, const InequalityReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  out << '"' << r.body << "\"," << r.n << ',' << opt(r.p) << ',' << opt(r.q) << ',' << r.id << ',' << (r.asserted ? 1 : 0) << ','
      << format_number(r.left) << ',' << format_number(r.right) << ',' << opt(r.middle) << ',' << format_number(r.slack) << ','
      << format_number(r.tol) << ',' << (r.pass ? 1 : 0) << ',' << (r.strict ? 1 : 0) << '\n';
}

}  // namespace capgeo
