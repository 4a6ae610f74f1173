// Body descriptor strings.
//
//   ball:r=1[;n=3]
//   ellipsoid:1,1,2
//   superellipsoid:1,1,1;e=4
//   roundedbox:1,1,1;r=0.2
//   radial:<path to JSON coefficients or samples>
//
// Any kind accepts the trailing modifiers ;c=x,y,... (center) and
// ;rot=i,j,degrees (applied in order).
#pragma once

#include "capgeo/body.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace capgeo {

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ParseError("descriptor: bad number '" + s + "' for " + what);
  return v;
}

inline int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) throw ParseError("descriptor: bad integer '" + s + "' for " + what);
  return v;
}

inline Point parse_list(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  Point p(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) p[static_cast<Eigen::Index>(i)] = parse_real(parts[i], what);
  return p;
}

}  // namespace detail

/// Parses a descriptor; malformed text raises ParseError, invalid geometry raises InvalidArgument.
inline Body parse_body(const std::string& text) {
  using namespace detail;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("descriptor: missing ':' in '" + text + "'");
  const std::string kind = trim(std::string_view(text).substr(0, colon));
  const std::string rest = text.substr(colon + 1);

  std::string main;
  std::vector<std::pair<std::string, std::string>> opts;
  if (kind == "radial") {
    // the path may itself contain ';' only if no modifier follows
    const auto semi = rest.find(";c=");
    const auto semi2 = rest.find(";rot=");
    const auto cut = std::min(semi, semi2);
    main = trim(rest.substr(0, cut));
    if (cut != std::string::npos) {
      for (const auto& part : split(rest.substr(cut + 1), ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw ParseError("descriptor: expected key=value, got '" + part + "'");
        opts.emplace_back(trim(part.substr(0, eq)), trim(part.substr(eq + 1)));
      }
    }
  } else {
    const auto parts = split(rest, ';');
    main = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].empty()) continue;
      const auto eq = parts[i].find('=');
      if (eq == std::string::npos) throw ParseError("descriptor: expected key=value, got '" + parts[i] + "'");
      opts.emplace_back(trim(parts[i].substr(0, eq)), trim(parts[i].substr(eq + 1)));
    }
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    for (auto it = opts.begin(); it != opts.end(); ++it) {
      if (it->first == key) {
        auto v = it->second;
        opts.erase(it);
        return v;
      }
    }
    return std::nullopt;
  };

  std::optional<Body> body;
  if (kind == "ball") {
    std::string rs = main;
    if (main.rfind("r=", 0) == 0) rs = main.substr(2);
    const double r = parse_real(rs, "ball radius");
    int n = 3;
    if (auto v = take("n")) n = parse_int(*v, "dimension");
    body = Body::ball(n, r);
  } else if (kind == "ellipsoid") {
    body = Body::ellipsoid(parse_list(main, "semi-axes"));
  } else if (kind == "superellipsoid") {
    const auto e = take("e");
    if (!e) throw ParseError("descriptor: superellipsoid needs ;e=<exponent>");
    body = Body::superellipsoid(parse_list(main, "semi-axes"), parse_real(*e, "exponent"));
  } else if (kind == "roundedbox") {
    const auto r = take("r");
    if (!r) throw ParseError("descriptor: roundedbox needs ;r=<rounding radius>");
    body = Body::rounded_box(parse_list(main, "half widths"), parse_real(*r, "rounding radius"));
  } else if (kind == "radial") {
    if (main.empty()) throw ParseError("descriptor: radial needs a file path");
    RadialFunction f = [&] {
      try {
        return RadialFunction::from_file(main);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("descriptor: cannot parse radial file '" + main + "': " + e.what());
      }
    }();
    body = Body::radial_graph(std::move(f), main);
  } else {
    throw ParseError("descriptor: unknown body kind '" + kind + "'");
  }

  // modifiers in order of appearance
  for (const auto& [key, value] : opts) {
    if (key == "c") {
      const Point c = parse_list(value, "center");
      if (c.size() != body->dim()) throw ParseError("descriptor: center has wrong dimension");
      body = body->translated(c - body->center());
    } else if (key == "rot") {
      const auto parts = split(value, ',');
      if (parts.size() != 3) throw ParseError("descriptor: rot needs i,j,degrees");
      body = body->rotated(parse_int(parts[0], "rot axis"), parse_int(parts[1], "rot axis"), parse_real(parts[2], "rot angle"));
    } else {
      throw ParseError("descriptor: unknown modifier '" + key + "' for " + kind);
    }
  }
  return *body;
}

}  // namespace capgeo
