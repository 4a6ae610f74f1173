#include "capgeo/body.hpp"
#include "capgeo/descriptor.hpp"
#include "capgeo/riesz.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace capgeo;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent oracle for the spheroid (a, a, c) at the equator point (a, 0, 0):
// polar coordinates about the singular point in the (u, v) parameter plane,
// one Gauss-Legendre product rule per sector of the parameter rectangle.
double spheroid_equator_potential(double a, double c, int nodes) {
  const GaussLegendre gl(nodes);
  const double hu = kPi / 2.0, hv = kPi;  // rectangle [-hu, hu] x [-hv, hv] around (pi/2, 0)
  const double corner = std::atan2(hv, hu);
  const std::array<double, 5> cuts{-corner, corner, kPi - corner, kPi + corner, 2.0 * kPi - corner};
  auto integrand = [&](double u, double v) {
    const double su = std::sin(u), cu = std::cos(u);
    const double dx = a * su * std::cos(v) - a, dy = a * su * std::sin(v), dz = c * cu;
    const double jac = a * su * std::sqrt(c * c * su * su + a * a * cu * cu);
    return jac / std::sqrt(dx * dx + dy * dy + dz * dz);
  };
  double total = 0.0;
  for (int s = 0; s < 4; ++s) {
    const double p0 = cuts[static_cast<std::size_t>(s)], p1 = cuts[static_cast<std::size_t>(s) + 1];
    for (int i = 0; i < nodes; ++i) {
      const double phi = 0.5 * (p1 - p0) * (gl.x[static_cast<std::size_t>(i)] + 1.0) + p0;
      const double wphi = 0.5 * (p1 - p0) * gl.w[static_cast<std::size_t>(i)];
      const double cp = std::cos(phi), sp = std::sin(phi);
      const double smax = std::min(std::abs(cp) > 1e-15 ? hu / std::abs(cp) : 1e300, std::abs(sp) > 1e-15 ? hv / std::abs(sp) : 1e300);
      for (int j = 0; j < nodes; ++j) {
        const double r = 0.5 * smax * (gl.x[static_cast<std::size_t>(j)] + 1.0);
        const double wr = 0.5 * smax * gl.w[static_cast<std::size_t>(j)];
        total += wphi * wr * r * integrand(kPi / 2.0 + r * cp, r * sp);
      }
    }
  }
  return total / (4.0 * kPi);
}
}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (const int n : {1, 4, 12, 48}) {
    const GaussLegendre gl(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += gl.w[static_cast<std::size_t>(i)] * std::pow(gl.x[static_cast<std::size_t>(i)], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-13) << n << " " << deg;
    }
  }
  EXPECT_THROW(GaussLegendre(0), InvalidArgument);
}

TEST(SingleLayer, SphereClosedForm) {
  // S(x) = r on the radius-r sphere
  for (const double r : {0.5, 1.0, 2.0}) {
    const Body b = Body::ball(3, r);
    for (const auto& d : Body::sphere_directions(3, 12)) EXPECT_NEAR(single_layer(b, d) / r, 1.0, 1e-2);
    EXPECT_NEAR(single_layer(b, Body::sphere_directions(3, 1).front()) / r, 1.0, 1e-10);
  }
}

TEST(SingleLayer, SphereEnergyClosedForm) {
  // energy of the radius-r sphere: 16 pi^2 r^3
  for (const double r : {1.0, 2.0}) EXPECT_NEAR(single_layer_energy(Body::ball(3, r)) / (16 * kPi * kPi * r * r * r), 1.0, 1e-6);
}

TEST(SingleLayer, OracleSelfCheckOnSphere) { EXPECT_NEAR(spheroid_equator_potential(1.0, 1.0, 64), 1.0, 1e-6); }

TEST(SingleLayer, ProlateEquatorAgainstIndependentOracle) {
  const double oracle = spheroid_equator_potential(1.0, 2.0, 96);
  EXPECT_NEAR(oracle, 1.3628706, 1e-5);
  Point d(3);
  d << 1.0, 0.0, 0.0;
  EXPECT_NEAR(single_layer(parse_body("ellipsoid:1,1,2"), d) / oracle, 1.0, 1e-4);
  // rotated about z the equator point is unchanged
  EXPECT_NEAR(single_layer(parse_body("ellipsoid:1,1,2;rot=0,1,40"), d) / oracle, 1.0, 1e-4);
}

TEST(SingleLayer, OblateEquatorAgainstIndependentOracle) {
  const double oracle = spheroid_equator_potential(1.5, 1.0, 96);
  Point d(3);
  d << 1.0, 0.0, 0.0;
  EXPECT_NEAR(single_layer(parse_body("ellipsoid:1.5,1.5,1"), d) / oracle, 1.0, 1e-4);
}

TEST(SingleLayer, ScalesLinearly) {
  const Body b = parse_body("superellipsoid:1,1,1;e=4");
  const auto d = Body::sphere_directions(3, 5)[3];
  EXPECT_NEAR(single_layer(b.scaled(2.0), d) / single_layer(b, d), 2.0, 1e-9);
}

TEST(SingleLayer, OnlyThreeDimensions) {
  Point d(2);
  d << 1.0, 0.0;
  EXPECT_THROW(single_layer(Body::ball(2, 1.0), d), InvalidArgument);
}
