#include "capgeo/body.hpp"
#include "capgeo/descriptor.hpp"
#include "capgeo/functionals.hpp"
#include "capgeo/mesh.hpp"
#include "corpus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace capgeo;

namespace {
constexpr double kPi = std::numbers::pi;

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}
}  // namespace

TEST(UnitSphereArea, ClosedForms) {
  EXPECT_NEAR(unit_sphere_area(2), 2 * kPi, 1e-12);
  EXPECT_NEAR(unit_sphere_area(3), 4 * kPi, 1e-12);
  EXPECT_NEAR(unit_sphere_area(4), 2 * kPi * kPi, 1e-12);
  EXPECT_NEAR(unit_sphere_area(5), 8.0 * kPi * kPi / 3.0, 1e-12);
  EXPECT_THROW(unit_sphere_area(1), InvalidArgument);
}

TEST(Body, RejectsDegenerateLengths) {
  EXPECT_THROW(Body::ball(3, 1e-10), InvalidArgument);
  EXPECT_THROW(Body::ellipsoid(vec({1, 0, 1})), InvalidArgument);
  EXPECT_THROW(Body::superellipsoid(vec({1, 1, 1}), 1.5), InvalidArgument);
  EXPECT_THROW(Body::rounded_box(vec({1, 1, 1}), 0.0), InvalidArgument);
  EXPECT_THROW(Body::rounded_box(vec({1, 0.1, 1}), 0.2), InvalidArgument);
}

TEST(Body, ConvexKindsPassSampledConvexity) {
  for (const auto& d : test::corpus()) {
    const Body b = parse_body(d);
    EXPECT_EQ(b.sampled_convexity_violation(10000), 0.0) << d;
  }
}

TEST(Body, RadialGraphMustBePositive) {
  RadialFunction ok(3, {{0, 0, 1.0}, {2, 0, 0.2}});
  EXPECT_NO_THROW(Body::radial_graph(ok));
  RadialFunction bad(3, {{0, 0, 0.1}, {1, 0, 0.5}});
  EXPECT_THROW(Body::radial_graph(bad), InvalidArgument);
}

TEST(Body, ContainsAndRadialDistanceAgree) {
  const Body b = parse_body("ellipsoid:1,1,2;c=0.5,0,0;rot=0,2,30");
  for (const auto& d : Body::sphere_directions(3, 200)) {
    const double r = b.radial_distance(d);
    EXPECT_TRUE(b.contains(b.center() + 0.999 * r * d));
    EXPECT_FALSE(b.contains(b.center() + 1.001 * r * d));
  }
}

TEST(Descriptor, ParsesEveryKind) {
  EXPECT_EQ(parse_body("ball:r=1").kind(), BodyKind::ball);
  EXPECT_EQ(parse_body("ball:r=2;n=2").dim(), 2);
  EXPECT_EQ(parse_body("ellipsoid:1,1,2").semi_axes()[2], 2.0);
  EXPECT_EQ(parse_body("superellipsoid:1,1,1;e=4").exponent(), 4.0);
  EXPECT_EQ(parse_body("roundedbox:1,1,1;r=0.2").rounding(), 0.2);
  EXPECT_NEAR(parse_body("ball:r=1;c=1,2,3").center()[2], 3.0, 0.0);
}

TEST(Descriptor, CanonicalFormRoundTrips) {
  for (const char* d : {"ball:r=1", "ball:r=0.5;n=2", "ellipsoid:1,1,2", "superellipsoid:1,1,1;e=4",
                        "roundedbox:1,1,1;r=0.3", "ellipsoid:1,1.5,2;c=0.1,0,0;rot=0,1,15"}) {
    const Body b = parse_body(d);
    EXPECT_EQ(b.descriptor(), d);
    EXPECT_EQ(parse_body(b.descriptor()).descriptor(), b.descriptor());
  }
}

TEST(Descriptor, MalformedInputRaisesParseError) {
  for (const char* d : {"ball", "cube:1", "ball:r=x", "ellipsoid:1,,2", "superellipsoid:1,1,1", "roundedbox:1,1,1",
                        "ball:r=1;zz=3", "ellipsoid:1,1,2;rot=0,1", "radial:", "radial:/nonexistent/file.json"}) {
    EXPECT_THROW(parse_body(d), ParseError) << d;
  }
}

TEST(Mesh, UnitBallAreaAtResolution64) {
  const auto m = mesh_body(Body::ball(3, 1.0), 64);
  const auto f = functionals(m, {3.0});
  EXPECT_LT(std::abs(f.area / (4 * kPi) - 1.0), 5e-3);
}

TEST(Mesh, EllipsoidIsClosed) {
  const auto m = mesh_body(parse_body("ellipsoid:1,1,2"), 64);
  EXPECT_LE(m.closedness_flux(), 1e-10);
}

TEST(Mesh, CorpusMeshesAreClosed) {
  for (const auto& d : test::corpus()) EXPECT_LE(mesh_body(parse_body(d), 64).closedness_flux(), 1e-10) << d;
}

TEST(Mesh, RoundedBoxCurvatureIsNonNegativeAndPositiveOnRoundedPatches) {
  const Body b = parse_body("roundedbox:1,1,1;r=0.2");
  const auto m = mesh_body(b, 64);
  int rounded = 0;
  for (const auto& e : m.elements) {
    EXPECT_GE(e.mean_curvature, -1e-12);
    const Point y = (e.centroid - b.center()).cwiseAbs();
    const int outside = (y.array() > 0.82).count();
    if (outside >= 2) {
      EXPECT_GT(e.mean_curvature, 0.0);
      ++rounded;
    }
  }
  EXPECT_GT(rounded, 0);
}

TEST(Mesh, RejectsResolutionOutOfBounds) {
  EXPECT_THROW(mesh_body(Body::ball(3, 1.0), 2), InvalidArgument);
  EXPECT_THROW(mesh_body(Body::ball(3, 1.0), 100000), InvalidArgument);
}

TEST(Mesh, CurvatureSignOnConvexCorpus) {
  for (const auto& d : test::corpus()) EXPECT_GE(mesh_body(parse_body(d), 48).min_curvature(), -1e-12) << d;
  for (const auto& d : {"ball:r=1", "ellipsoid:1,1,2", "ellipsoid:1.5,1.5,1"})
    EXPECT_GT(mesh_body(parse_body(d), 48).min_curvature(), 0.0) << d;
}

TEST(Functionals, BallWillmoreValues) {
  const auto f1 = functionals(mesh_body(Body::ball(3, 1.0), 96), {2.0, 3.0});
  EXPECT_NEAR(f1.willmore_at(3.0), 1.0, 1e-3);
  const auto f2 = functionals(mesh_body(Body::ball(3, 2.0), 96), {2.0, 3.0});
  EXPECT_NEAR(f2.willmore_at(3.0), 1.0, 1e-3);
  EXPECT_NEAR(f2.willmore_at(2.0), 2.0, 2e-3);
  const auto f3 = functionals(mesh_body(Body::ball(2, 0.7), 64), {2.0});
  EXPECT_NEAR(f3.willmore_at(2.0), 1.0, 1e-3);
}

TEST(Functionals, RejectsExponentsOutsideRange) {
  const auto m = mesh_body(Body::ball(3, 1.0), 16);
  EXPECT_THROW(functionals(m, {0.5}), InvalidArgument);
  EXPECT_THROW(functionals(m, {3.5}), InvalidArgument);
}

TEST(Functionals, NonPositiveCurvatureOnNonconvexMeshIsAnError) {
  // peanut-shaped radial graph with a concave waist
  RadialFunction f(3, {{0, 0, 1.0}, {2, 0, 0.9}});
  const Body b = Body::radial_graph(f);
  const auto m = mesh_body(b, 64);
  ASSERT_LT(m.min_curvature(), 0.0);
  EXPECT_NO_THROW(functionals(m, {1.0}));
  EXPECT_THROW(functionals(m, {2.0}), NumericalError);
}

TEST(Functionals, BallAreaAndVolumeConvergeAtSecondOrder) {
  for (const double r : {0.5, 1.0, 2.0}) {
    const Body b = Body::ball(3, r);
    const double area = 4 * kPi * r * r, vol = 4.0 / 3.0 * kPi * r * r * r;
    double prev_a = 0.0, prev_v = 0.0;
    for (const int res : {16, 32, 64}) {
      const auto f = functionals(mesh_body(b, res), {1.0});
      const double ea = std::abs(f.area - area) / area, ev = std::abs(f.volume - vol) / vol;
      if (res > 16) {
        EXPECT_GT(prev_a / ea, 3.0) << "r=" << r << " res=" << res;
        EXPECT_GT(prev_v / ev, 3.0) << "r=" << r << " res=" << res;
      }
      prev_a = ea;
      prev_v = ev;
    }
  }
}

TEST(Functionals, ScalingLaws) {
  for (const auto& d : test::corpus()) {
    const Body b = parse_body(d);
    const auto f1 = functionals(mesh_body(b, 64), {3.0});
    const auto f2 = functionals(mesh_body(b.scaled(2.0), 64), {3.0});
    EXPECT_NEAR(f2.area / f1.area, 4.0, 4e-6) << d;
    EXPECT_NEAR(f2.volume / f1.volume, 8.0, 8e-6) << d;
    EXPECT_NEAR(f2.willmore_at(3.0) / f1.willmore_at(3.0), 1.0, 1e-6) << d;
  }
}

TEST(Functionals, IsoperimetricOnCorpusWithEqualityOnlyForBalls) {
  for (const auto& d : test::corpus()) {
    const Body b = parse_body(d);
    const auto f = functionals(mesh_body(b, 128), {3.0});
    EXPECT_LE(f.normalized_volume, f.normalized_area * (1 + 1e-6)) << d;
    const double gap = 1.0 - f.normalized_volume / f.normalized_area;
    if (b.kind() == BodyKind::ball)
      EXPECT_LT(gap, 1e-3) << d;
    else
      EXPECT_GT(gap, 1e-3) << d;
  }
}

TEST(Functionals, WillmoreInequalityOnConvexCorpus) {
  for (const auto& d : test::corpus()) {
    const Body b = parse_body(d);
    const double w = functionals(mesh_body(b, 128), {3.0}).willmore_at(3.0);
    EXPECT_GE(w, 1.0 - 1e-3) << d;
    if (b.kind() == BodyKind::ball)
      EXPECT_LT(std::abs(w - 1.0), 1e-3) << d;
    else
      EXPECT_GT(w, 1.0 + 1e-3) << d;
  }
}

TEST(Functionals, EllipsoidAgainstSpheroidClosedForms) {
  // prolate spheroid a = 1, c = 2: area 2 pi a^2 (1 + c/(a e) asin e), e = sqrt(1 - a^2/c^2)
  const double e = std::sqrt(1.0 - 0.25);
  const double area = 2 * kPi * (1.0 + 2.0 / e * std::asin(e));
  const auto f = functionals(mesh_body(parse_body("ellipsoid:1,1,2"), 128), {2.0});
  EXPECT_NEAR(f.area / area, 1.0, 1e-3);
  EXPECT_NEAR(f.volume / (4.0 / 3.0 * kPi * 2.0), 1.0, 1e-3);
}

TEST(Functionals, HighDimensionalBallChart) {
  const auto f = functionals(mesh_body(Body::ball(4, 1.5), 24), {4.0});
  EXPECT_NEAR(f.area / (2 * kPi * kPi * std::pow(1.5, 3)), 1.0, 5e-3);
  EXPECT_NEAR(f.willmore_at(4.0), 1.0, 5e-3);
}
