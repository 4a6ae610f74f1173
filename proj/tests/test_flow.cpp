#include "capgeo/body.hpp"
#include "capgeo/descriptor.hpp"
#include "capgeo/imcf_flow.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace capgeo;

namespace {
constexpr double kPi = std::numbers::pi;

double area_error(const std::string& body, double T, double dt) {
  FlowConfig c;
  c.dt = dt;
  return area_growth_check(evolve(parse_body(body), T, {2.0}, c));
}
}  // namespace

TEST(Flow, CircleRadiusGrowsExponentially) {
  for (const double r0 : {0.5, 1.0, 2.0}) {
    const auto tr = evolve(Body::ball(2, r0), 1.0, {1.5});
    EXPECT_LT(radius_growth_check(tr), 1e-2);
    EXPECT_LT(area_growth_check(tr), 1e-2);
    const double expected = r0 * std::exp(tr.records.back().t);
    for (const double rho : tr.final_surface.rho) EXPECT_NEAR(rho / expected, 1.0, 1e-2);
  }
}

TEST(Flow, SphereRadiusAndAreaGrowExponentially) {
  const auto tr = evolve(Body::ball(3, 1.0), 1.0, {2.0});
  EXPECT_LT(radius_growth_check(tr), 1e-2);
  EXPECT_LT(area_growth_check(tr), 1e-2);
  EXPECT_NEAR(tr.records.back().t, 1.0, 1e-12);
  EXPECT_NEAR(tr.records.front().area, 4 * kPi, 1e-2 * 4 * kPi);
  for (const auto& r : tr.records) EXPECT_NEAR(r.anisotropy, 1.0, 1e-9);
}

TEST(Flow, SphereFunctionalAgainstClosedForm) {
  // U_p on a radius-r sphere: (n-1)^{p-1} r^{n-p}
  for (const double r : {0.5, 1.0, 2.0}) {
    const auto tr = evolve(Body::ball(3, r), 0.01, {1.5, 2.0, 2.5});
    for (std::size_t k = 0; k < tr.p_list.size(); ++k) {
      const double p = tr.p_list[k];
      EXPECT_NEAR(tr.records.front().up[k] / (std::pow(2.0, p - 1.0) * std::pow(r, 3.0 - p)), 1.0, 1e-3);
    }
    EXPECT_NEAR(tr.records.front().willmore_n, 1.0, 1e-3);
  }
}

TEST(Flow, HalvingTheStepHalvesTheError) {
  const double coarse = area_error("ellipsoid:1,1,2", 1.0, 1e-3);
  const double fine = area_error("ellipsoid:1,1,2", 1.0, 5e-4);
  EXPECT_GE(coarse / fine, 1.8) << coarse << " " << fine;
}

TEST(Flow, EllipsoidAreaGrowthAndRounding) {
  const auto tr = evolve(parse_body("ellipsoid:1,1,2"), 2.0, {2.0});
  EXPECT_LT(area_growth_check(tr), 1e-2);
  EXPECT_LT(tr.records.back().anisotropy, tr.records.front().anisotropy);
  EXPECT_LT(tr.records.back().willmore_n, tr.records.front().willmore_n);
}

TEST(Flow, UpGrowthBoundOnEllipsoid) {
  const auto tr = evolve(parse_body("ellipsoid:1,1,2"), 2.0, {2.0, 2.5});
  for (const double p : {2.0, 2.5}) {
    const auto c = up_growth_check(tr, p);
    EXPECT_TRUE(c.pass) << p << " slack " << c.min_slack;
    EXPECT_GE(c.min_slack, -1e-2 * c.up0);
  }
}

TEST(Flow, CapacityBoundIsOneOnTheUnitSphere) {
  for (const double p : {1.3, 2.0, 2.5}) {
    const auto tr = evolve(Body::ball(3, 1.0), flow_time_for_tail(3, p, 5e-3), {p});
    const auto b = flow_capacity_bound(tr, p);
    EXPECT_NEAR(b.normalized, 1.0, 2e-2) << p;
  }
}

TEST(Flow, CapacityBoundScalesLikeCapacity) {
  const double p = 2.0, T = flow_time_for_tail(3, p, 5e-3);
  const double a = flow_capacity_bound(evolve(Body::ball(3, 1.0), T, {p}), p).normalized;
  const double b = flow_capacity_bound(evolve(Body::ball(3, 2.0), T, {p}), p).normalized;
  EXPECT_NEAR(b / a, 2.0, 2e-3);
}

TEST(Flow, ShortTraceRejectedForCapacityBound) {
  const auto tr = evolve(Body::ball(3, 1.0), 0.5, {2.0});
  EXPECT_THROW(flow_capacity_bound(tr, 2.0), NumericalError);
}

TEST(Flow, TraceIsTranslationInvariant) {
  const auto a = evolve(parse_body("ellipsoid:1,1,2"), 0.5, {2.0});
  const auto b = evolve(parse_body("ellipsoid:1,1,2;c=1,-2,0.5"), 0.5, {2.0});
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_NEAR(a.records.back().area, b.records.back().area, 1e-12 * a.records.back().area);
}

TEST(Flow, TailTimeFormula) {
  EXPECT_NEAR(flow_time_for_tail(3, 2.0, 1e-2), 2.0 * std::log(100.0), 1e-12);
  EXPECT_THROW(flow_time_for_tail(3, 3.0), InvalidArgument);
}

TEST(Flow, NonConvexStartIsRejected) {
  RadialFunction f(3, {{0, 0, 1.0}, {2, 0, 0.9}});
  EXPECT_THROW(evolve(Body::radial_graph(f), 0.5, {2.0}), NumericalError);
}

TEST(Flow, UnsupportedBodiesAreRejected) {
  EXPECT_THROW(evolve(parse_body("ellipsoid:1,1.5,2"), 0.5, {2.0}), InvalidArgument);
  EXPECT_THROW(evolve(Body::ball(3, 1.0), -1.0, {2.0}), InvalidArgument);
}

TEST(Flow, StableStepRejectionWithoutSubstepping) {
  FlowConfig c;
  c.dt = 0.5;
  c.substep = false;
  EXPECT_THROW(evolve(parse_body("ellipsoid:1,1,2"), 1.0, {2.0}, c), NumericalError);
}

TEST(Flow, CsvColumns) {
  const auto tr = evolve(Body::ball(3, 1.0), 0.01, {1.5, 2.0});
  std::ostringstream out;
  write_flow_csv(out, tr);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,area,U_p1.5,U_p2,willmore_n");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, tr.records.size());
}
