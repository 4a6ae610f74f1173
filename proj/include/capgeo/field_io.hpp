// Flat binary export of a potential field with a JSON sidecar.
//
// <stem>.bin       float64 little-endian values, first axis fastest
// <stem>.mask.bin  uint8 node states (0 exterior, 1 inside the body, 2 outer boundary)
// <stem>.json      dimensions, origin, per-axis spacing range and node coordinates, p, body
#pragma once

#include "capgeo/capacity_solver.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

namespace capgeo {

inline nlohmann::json field_sidecar(const PotentialField& f, const std::string& stem) {
  nlohmann::json dims = nlohmann::json::array(), origin = nlohmann::json::array(), spacing = nlohmann::json::array(),
                 axes = nlohmann::json::array();
  bool uniform = true;
  for (int a = 0; a < f.dim; ++a) {
    const auto& ax = f.axes[static_cast<std::size_t>(a)];
    dims.push_back(ax.size());
    origin.push_back(ax.front());
    double hmin = 1e300, hmax = 0.0;
    for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
      hmin = std::min(hmin, ax[i + 1] - ax[i]);
      hmax = std::max(hmax, ax[i + 1] - ax[i]);
    }
    if (hmax - hmin > 1e-12 * hmax) uniform = false;
    spacing.push_back({{"min", hmin}, {"max", hmax}});
    axes.push_back(ax);
  }
  return {{"format", "capgeo-field-1"},
          {"values_file", stem + ".bin"},
          {"mask_file", stem + ".mask.bin"},
          {"value_type", "float64-le"},
          {"order", "first axis fastest"},
          {"dimension", f.dim},
          {"dimensions", dims},
          {"origin", origin},
          {"spacing", spacing},
          {"uniform", uniform},
          {"axes", axes},
          {"p", f.p},
          {"box_radius", f.box_radius},
          {"far_value", f.far_value()},
          {"raw_energy", f.raw_energy},
          {"corrected_capacity", f.corrected_capacity},
          {"body", f.body_descriptor}};
}

/// Writes <directory>/<stem>.bin, .mask.bin and .json.
inline void export_field(const PotentialField& f, const std::string& directory, const std::string& stem) {
  const std::string base = directory.empty() ? stem : directory + "/" + stem;
  {
    std::ofstream out(base + ".bin", std::ios::binary);
    if (!out) throw InvalidArgument("export_field: cannot write " + base + ".bin");
    for (double v : f.values) {
      unsigned char bytes[8];
      std::memcpy(bytes, &v, 8);
      if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
  {
    std::ofstream out(base + ".mask.bin", std::ios::binary);
    if (!out) throw InvalidArgument("export_field: cannot write " + base + ".mask.bin");
    for (const auto s : f.state) out.put(static_cast<char>(s));
  }
  std::ofstream out(base + ".json");
  if (!out) throw InvalidArgument("export_field: cannot write " + base + ".json");
  out << field_sidecar(f, stem).dump(2) << "\n";
}

}  // namespace capgeo
