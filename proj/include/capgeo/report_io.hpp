// JSON serialization of estimates and run metadata.
#pragma once

#include "capgeo/capacity_solver.hpp"
#include "capgeo/version.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <string>

namespace capgeo {

/// Rounds v to 12 significant digits.
inline double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

/// Applies round12 to every floating-point number in the tree.
inline nlohmann::json round_json(const nlohmann::json& j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_json(it.value());
    return out;
  }
  if (j.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : j) out.push_back(round_json(v));
    return out;
  }
  return j;
}

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
inline std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json run_metadata(const std::string& command, const nlohmann::json& config) {
  return {{"tool", "capgeo"}, {"version", kVersion}, {"command", command}, {"config_hash", config_hash(config)},
          {"date", utc_timestamp()}, {"config", config}};
}

inline nlohmann::json to_json(const SolverConfig& c) {
  return {{"grid", c.grid},
          {"box_radius", c.box_radius},
          {"box_factor", c.box_factor},
          {"tol", c.tol},
          {"stall_window", c.stall_window},
          {"max_iter", c.max_iter},
          {"graded", c.graded},
          {"richardson", c.richardson},
          {"use_symmetry", c.use_symmetry}};
}

/// Reads the solver keys present in `j` into `c`; other keys are ignored.
inline void apply_solver_json(const nlohmann::json& j, SolverConfig& c) {
  try {
    if (j.contains("grid")) c.grid = j.at("grid").get<int>();
    if (j.contains("box_radius")) c.box_radius = j.at("box_radius").get<double>();
    if (j.contains("box_factor")) c.box_factor = j.at("box_factor").get<double>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("stall_window")) c.stall_window = j.at("stall_window").get<int>();
    if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
    if (j.contains("graded")) c.graded = j.at("graded").get<bool>();
    if (j.contains("richardson")) c.richardson = j.at("richardson").get<bool>();
    if (j.contains("use_symmetry")) c.use_symmetry = j.at("use_symmetry").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("solver config: ") + e.what());
  }
}

inline nlohmann::json to_json(const GridSolve& s) {
  return {{"grid", s.grid},
          {"raw", s.raw},
          {"corrected", s.corrected},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"final_relative_change", s.final_relative_change},
          {"seconds", s.seconds},
          {"h_min", s.h_min},
          {"h_max", s.h_max},
          {"surface_spacing", s.surface_spacing},
          {"far_field_spread", s.far_field_spread},
          {"orthant", s.orthant},
          {"energy_monotone", s.energy_monotone}};
}

inline nlohmann::json to_json(const PCapacityEstimate& e) {
  nlohmann::json solves = nlohmann::json::array();
  for (const auto& s : e.solves) solves.push_back(to_json(s));
  return {{"n", e.n},
          {"p", e.p},
          {"body", e.body_descriptor},
          {"raw", e.raw},
          {"corrected", e.corrected},
          {"value", e.value},
          {"lower", e.lower},
          {"upper", e.upper},
          {"normalized", e.normalized},
          {"capacity_radius", e.capacity_radius},
          {"box_radius", e.box_radius},
          {"h", e.h},
          {"circumscribed_correction", e.circumscribed_correction},
          {"truncation_uncertainty", e.truncation_uncertainty},
          {"discretization_uncertainty", e.discretization_uncertainty},
          {"convergence_uncertainty", e.convergence_uncertainty},
          {"inscribed_bound", e.inscribed_bound},
          {"circumscribed_bound", e.circumscribed_bound},
          {"extrapolated", e.extrapolated},
          {"solves", solves}};
}

}  // namespace capgeo
