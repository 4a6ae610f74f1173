// Smooth positive functions on the unit sphere S^{n-1}, n in {2, 3}.
//
// n = 2: rho(phi) = sum_m c_m * (m >= 0 ? cos(m phi) : sin(|m| phi))
// n = 3: rho(theta, phi) = sum_{l,m} c_lm * P_l^{|m|}(cos theta) * (m >= 0 ? cos(m phi) : sin(|m| phi))
//
// P_l^m is the associated Legendre function without the Condon-Shortley
// phase, so the (0,0) mode is the constant 1.
#pragma once

#include "capgeo/common.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace capgeo {

struct RadialMode {
  int l = 0;  // ignored for n = 2
  int m = 0;
  double value = 0.0;
};

namespace detail {

// P_l^m(x) for 0 <= m <= l, no Condon-Shortley phase.
inline double assoc_legendre(int l, int m, double x) {
  double pmm = 1.0;
  if (m > 0) {
    const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= fact * s;
      fact += 2.0;
    }
  }
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = ((2.0 * ll - 1.0) * x * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

inline double trig_mode(int m, double phi) { return m >= 0 ? std::cos(m * phi) : std::sin(-m * phi); }

inline double basis(int dim, int l, int m, const Point& u) {
  const double phi = std::atan2(u[1], u[0]);
  if (dim == 2) return trig_mode(m, phi);
  const double ct = std::clamp(u[2], -1.0, 1.0);
  return assoc_legendre(l, std::abs(m), ct) * trig_mode(m, phi);
}

}  // namespace detail

class RadialFunction {
 public:
  RadialFunction(int dim, std::vector<RadialMode> modes) : dim_(dim), modes_(std::move(modes)) {
    if (dim_ != 2 && dim_ != 3) throw InvalidArgument("radial graphs are supported for n = 2 and n = 3 only");
    for (const auto& md : modes_) {
      if (dim_ == 3 && (md.l < 0 || std::abs(md.m) > md.l))
        throw ParseError("radial mode requires 0 <= |m| <= l, got l=" + std::to_string(md.l) + " m=" + std::to_string(md.m));
    }
    if (modes_.empty()) throw ParseError("radial function has no modes");
    for (const auto& md : modes_) degree_ = std::max(degree_, dim_ == 2 ? std::abs(md.m) : md.l);
    const auto size = static_cast<std::size_t>((degree_ + 1) * (degree_ + 1));
    cos_coef_.assign(size, 0.0);
    sin_coef_.assign(size, 0.0);
    for (const auto& md : modes_) {
      const int l = dim_ == 2 ? 0 : md.l;
      const auto k = static_cast<std::size_t>(l * (degree_ + 1) + std::abs(md.m));
      (md.m >= 0 ? cos_coef_ : sin_coef_)[k] += md.value;
    }
  }

  int dim() const { return dim_; }
  const std::vector<RadialMode>& modes() const { return modes_; }

  /// Radius in direction u (u need not be normalized).
  double operator()(const Point& u) const {
    const Point d = u.normalized();
    const double rho = std::hypot(d[0], d[1]);
    const double c1 = rho > 0.0 ? d[0] / rho : 1.0, s1 = rho > 0.0 ? d[1] / rho : 0.0;
    const int big_l = degree_ + 1;
    double r = 0.0;
    if (dim_ == 2) {
      double cm = 1.0, sm = 0.0;
      for (int m = 0; m <= degree_; ++m) {
        r += cos_coef_[static_cast<std::size_t>(m)] * cm + sin_coef_[static_cast<std::size_t>(m)] * sm;
        const double cn = cm * c1 - sm * s1;
        sm = sm * c1 + cm * s1;
        cm = cn;
      }
      return r;
    }
    const double x = std::clamp(d[2], -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double cm = 1.0, sm = 0.0, pmm = 1.0;
    for (int m = 0; m <= degree_; ++m) {
      if (m > 0) pmm *= (2.0 * m - 1.0) * st;
      // upward recurrence in l for fixed m
      double p0 = pmm, p1 = 0.0;
      for (int l = m; l <= degree_; ++l) {
        double pl;
        if (l == m) {
          pl = pmm;
        } else if (l == m + 1) {
          pl = x * (2.0 * m + 1.0) * pmm;
          p1 = pl;
        } else {
          pl = ((2.0 * l - 1.0) * x * p1 - (l + m - 1.0) * p0) / (l - m);
          p0 = p1;
          p1 = pl;
        }
        const auto k = static_cast<std::size_t>(l * big_l + m);
        r += pl * (cos_coef_[k] * cm + sin_coef_[k] * sm);
      }
      const double cn = cm * c1 - sm * s1;
      sm = sm * c1 + cm * s1;
      cm = cn;
    }
    return r;
  }

  /// True when rho depends on the polar angle only (n = 3), or always for n = 2.
  bool axisymmetric() const {
    if (dim_ == 2) return false;
    return std::all_of(modes_.begin(), modes_.end(), [](const RadialMode& md) { return md.m == 0 || md.value == 0.0; });
  }

  /// Least-squares fit of tabulated (direction, radius) samples up to `degree`.
  static RadialFunction fit(int dim, const std::vector<Point>& dirs, const std::vector<double>& radii, int degree) {
    if (dirs.size() != radii.size() || dirs.empty()) throw ParseError("radial samples: direction/radius count mismatch");
    std::vector<RadialMode> modes;
    if (dim == 2) {
      for (int m = -degree; m <= degree; ++m) modes.push_back({0, m, 0.0});
    } else {
      for (int l = 0; l <= degree; ++l)
        for (int m = -l; m <= l; ++m) modes.push_back({l, m, 0.0});
    }
    const auto rows = static_cast<Eigen::Index>(dirs.size());
    const auto cols = static_cast<Eigen::Index>(modes.size());
    if (rows < cols) throw ParseError("radial samples: too few samples for requested degree");
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (dirs[i].size() != dim) throw ParseError("radial samples: direction has wrong dimension");
      const Point d = dirs[i].normalized();
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = detail::basis(dim, modes[j].l, modes[j].m, d);
      b[i] = radii[i];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    for (Eigen::Index j = 0; j < cols; ++j) modes[j].value = c[j];
    return RadialFunction(dim, std::move(modes));
  }

  static RadialFunction from_json(const nlohmann::json& j) {
    try {
      const int dim = j.at("dimension").get<int>();
      if (j.contains("modes")) {
        std::vector<RadialMode> modes;
        for (const auto& e : j.at("modes")) modes.push_back({e.value("l", 0), e.at("m").get<int>(), e.at("value").get<double>()});
        return RadialFunction(dim, std::move(modes));
      }
      if (j.contains("samples")) {
        std::vector<Point> dirs;
        std::vector<double> radii;
        for (const auto& e : j.at("samples")) {
          const auto v = e.at("direction").get<std::vector<double>>();
          Point p(static_cast<Eigen::Index>(v.size()));
          for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
          dirs.push_back(p);
          radii.push_back(e.at("radius").get<double>());
        }
        int degree = j.value("degree", -1);
        if (degree < 0) {
          // largest degree whose basis size is at most a quarter of the samples
          const auto n = static_cast<int>(dirs.size());
          degree = 0;
          if (dim == 2)
            while (2 * (degree + 1) + 1 <= n / 4) ++degree;
          else
            while ((degree + 2) * (degree + 2) <= n / 4) ++degree;
          degree = std::min(degree, 12);
        }
        return fit(dim, dirs, radii, degree);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("radial function JSON: ") + e.what());
    }
    throw ParseError("radial function JSON needs either \"modes\" or \"samples\"");
  }

  static RadialFunction from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open radial function file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("radial function file " + path + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& md : modes_) modes.push_back({{"l", md.l}, {"m", md.m}, {"value", md.value}});
    return {{"dimension", dim_}, {"modes", modes}};
  }

  /// Same surface scaled by lambda.
  RadialFunction scaled(double lambda) const {
    auto m = modes_;
    for (auto& md : m) md.value *= lambda;
    return RadialFunction(dim_, std::move(m));
  }

 private:
  int dim_;
  std::vector<RadialMode> modes_;
  int degree_ = 0;
  std::vector<double> cos_coef_, sin_coef_;  // dense [l][|m|] tables
};

}  // namespace capgeo
