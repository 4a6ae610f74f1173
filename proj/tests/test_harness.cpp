#include "capgeo/descriptor.hpp"
#include "capgeo/inequality_harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace capgeo;

namespace {

HarnessConfig quick_config() {
  HarnessConfig c;
  c.solver.grid = 48;
  c.mesh_resolution = 96;
  c.riesz_samples = 16;
  return c;
}

const std::vector<double> kP{1.3, 2.0, 2.5};

const std::vector<InequalityReport>& ball_reports(double r) {
  static std::map<double, std::vector<InequalityReport>> cache;
  auto it = cache.find(r);
  if (it == cache.end()) {
    const auto ing = gather_ingredients(Body::ball(3, r), kP, quick_config());
    it = cache.emplace(r, evaluate_all(ing, kP)).first;
  }
  return it->second;
}

const InequalityReport& find(const std::vector<InequalityReport>& rs, const std::string& id, std::optional<double> p = std::nullopt) {
  for (const auto& r : rs)
    if (r.id == id && (!p || (r.p && std::abs(*r.p - *p) < 1e-12))) return r;
  throw std::runtime_error("missing report " + id);
}

}  // namespace

TEST(PolyaSzego, ConstantDifferencesAndOrdering) {
  const auto k = polya_szego_constants();
  EXPECT_NEAR(k.conjectured_minus_improved, 0.532857, 5e-7);
  EXPECT_NEAR(k.improved_minus_classical, 0.401922, 5e-7);
  EXPECT_TRUE(k.ordered);
  EXPECT_GT(k.conjectured, k.improved);
  EXPECT_GT(k.improved, k.classical);
}

TEST(Reports, JsonRoundTrip) {
  for (const auto& r : ball_reports(1.0)) {
    const nlohmann::json j = r;
    const auto back = j.get<InequalityReport>();
    EXPECT_EQ(back, r) << r.id;
  }
}

TEST(Reports, CsvHeaderAndRowShape) {
  std::ostringstream out;
  write_report_csv_header(out);
  const auto& rs = ball_reports(1.0);
  for (const auto& r : rs) write_report_csv_row(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "body,n,p,q,id,asserted,left,right,middle,slack,tol,pass,strict");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    // the quoted descriptor holds no commas for a ball
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12) << line;
  }
  EXPECT_EQ(rows, rs.size());
}

TEST(Reports, EveryIdentifierIsEvaluatedForABall) {
  const auto& rs = ball_reports(1.0);
  for (const char* id : {"isoperimetric", "willmore", "aleksandrov_fenchel", "isocapacitary", "capacity_area_volume",
                         "area_capacity", "capacity_willmore_p", "capacity_willmore_q", "p_aleksandrov_fenchel",
                         "capacity_area_willmore", "two_sided_bound", "flow_capacity_bound", "capacity_sqrt_area",
                         "polya_szego_constant", "polya_szego_conjecture", "capacity_log_convexity", "riesz_potential_bound",
                         "riesz_capacity_bound", "riesz_conjecture_scan", "riesz_energy_bound"})
    EXPECT_NO_THROW(find(rs, id)) << id;
  EXPECT_FALSE(find(rs, "polya_szego_conjecture").asserted);
  EXPECT_FALSE(find(rs, "riesz_conjecture_scan").asserted);
}

TEST(BallSuite, AssertedInequalitiesPassAndTightOnesClose) {
  for (const double r : {0.5, 1.0, 2.0}) {
    const auto& rs = ball_reports(r);
    EXPECT_TRUE(all_asserted_pass(rs)) << r;
    for (const auto& rep : rs) {
      EXPECT_TRUE(!rep.asserted || rep.pass) << rep.id << " r=" << r;
      if (rep.equality_case) EXPECT_LE(std::abs(rep.slack), rep.tol) << rep.id << " r=" << r;
    }
    for (const double p : kP) {
      const auto& av = find(rs, "capacity_area_volume", p);
      EXPECT_LE(std::abs(av.left - 1.0), 1e-2) << p;
      EXPECT_EQ(av.inputs.at("capacity").at("end_used"), "lower");
    }
  }
}

TEST(BallSuite, UnitBallSqrtAreaRatio) {
  // cap_2 = 4 pi against (3 sqrt(pi) / 2) sqrt(4 pi) = 3 pi
  const auto& rep = find(ball_reports(1.0), "capacity_sqrt_area");
  EXPECT_NEAR(rep.left, 3 * std::numbers::pi, 2e-3 * 3 * std::numbers::pi);
  EXPECT_NEAR(*rep.middle, 4.0 / 3.0, 1e-2);
}

TEST(BallSuite, TwoSidedBoundUpperGapCloses) {
  for (const double p : kP) {
    const auto& rep = find(ball_reports(1.0), "two_sided_bound", p);
    EXPECT_NEAR(rep.right, 1.0, 1e-3);
    EXPECT_NEAR(*rep.middle, 1.0, 1e-2);
    EXPECT_GE(*rep.middle, rep.left);
  }
}

TEST(ScaleCovariance, ReportsTransformConsistentlyUnderDoubling) {
  const auto& a = ball_reports(1.0);
  const auto& b = ball_reports(2.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].id, b[i].id);
    if (a[i].id == "two_sided_bound" || a[i].id == "endpoint_limits") continue;
    const double lr = b[i].left / a[i].left, rr = b[i].right / a[i].right;
    const bool mesh_only = !a[i].inputs.contains("capacity") && !a[i].inputs.contains("flow");
    const double tol = mesh_only ? 1e-6 : (a[i].tol / std::abs(a[i].right) + b[i].tol / std::abs(b[i].right));
    EXPECT_NEAR(lr / rr, 1.0, tol) << a[i].id;
  }
}

TEST(ConservativeEnds, WideningTheBracketNeverHelps) {
  auto ing = gather_ingredients(Body::ball(3, 1.0), {2.0}, [] {
    auto c = quick_config();
    c.riesz = false;
    c.flow = false;
    return c;
  }());
  const auto narrow = evaluate_all(ing, {2.0});
  for (auto& c : ing.capacities) {
    c.lower *= 0.9;
    c.upper *= 1.1;
  }
  const auto wide = evaluate_all(ing, {2.0});
  ASSERT_EQ(narrow.size(), wide.size());
  for (std::size_t i = 0; i < narrow.size(); ++i) {
    if (!narrow[i].inputs.contains("capacity")) continue;
    EXPECT_LE(wide[i].slack, narrow[i].slack + 1e-12) << narrow[i].id;
    EXPECT_GE(wide[i].tol, narrow[i].tol - 1e-12) << narrow[i].id;
  }
}

TEST(ConservativeEnds, CapacityEndPerInequality) {
  const auto& rs = ball_reports(1.0);
  EXPECT_EQ(find(rs, "area_capacity", 2.0).inputs.at("capacity").at("end_used"), "lower");
  EXPECT_EQ(find(rs, "capacity_sqrt_area").inputs.at("capacity").at("end_used"), "lower");
  EXPECT_EQ(find(rs, "capacity_willmore_p", 2.0).inputs.at("capacity").at("end_used"), "upper");
  EXPECT_EQ(find(rs, "capacity_area_willmore", 2.0).inputs.at("capacity").at("end_used"), "upper");
  EXPECT_EQ(find(rs, "capacity_log_convexity").inputs.at("capacity").at("end_used"), "upper");
  EXPECT_EQ(find(rs, "riesz_energy_bound").inputs.at("capacity").at("end_used"), "lower");
}

TEST(ChainConsistency, SharedIngredientsAgreeAcrossReports) {
  const auto& rs = ball_reports(1.0);
  for (const double p : kP) {
    const auto& aw = find(rs, "capacity_area_willmore", p);
    const auto& ts = find(rs, "two_sided_bound", p);
    // both use the upper end of the same bracket on the capacity side
    if (p >= 2.0) EXPECT_DOUBLE_EQ(find(rs, "capacity_willmore_p", p).left, aw.left);
    const double area_term = std::pow(find(rs, "isoperimetric").right, 3.0 - p);
    EXPECT_NEAR(aw.right, area_term * std::pow(find(rs, "willmore").right, (p - 1.0) / 2.0), 1e-12);
    EXPECT_NEAR(ts.right * area_term, aw.right, 1e-12);
  }
  const auto& af = find(rs, "aleksandrov_fenchel");
  const auto& paf = find(rs, "p_aleksandrov_fenchel", 2.0);
  EXPECT_DOUBLE_EQ(af.left, paf.left);
  EXPECT_DOUBLE_EQ(af.right, paf.right);
}

TEST(EllipsoidSuite, AllAssertedPassAtCoarseGrid) {
  const auto ing = gather_ingredients(parse_body("ellipsoid:1,1,2"), kP, quick_config());
  const auto rs = evaluate_all(ing, kP);
  for (const auto& rep : rs) EXPECT_TRUE(!rep.asserted || rep.pass) << rep.id << " slack " << rep.slack << " tol " << rep.tol;
  EXPECT_LT(find(rs, "capacity_area_volume", 2.0).left, 1.0);
  EXPECT_GT(find(rs, "willmore").slack, 3e-3);
  for (const double p : kP) EXPECT_TRUE(find(rs, "flow_capacity_bound", p).pass);
}

TEST(Harness, RejectsMissingIngredients) {
  auto c = quick_config();
  c.riesz = false;
  c.flow = false;
  const auto ing = gather_ingredients(Body::ball(2, 1.0), {1.5}, c);
  EXPECT_THROW(eval_capacity_sqrt_area(ing), InvalidArgument);
  EXPECT_THROW(eval_riesz_potential(ing), InvalidArgument);
  EXPECT_THROW(eval_capacity_willmore(ing, 1.5), InvalidArgument);
  EXPECT_THROW(ing.capacity(1.7), InvalidArgument);
  EXPECT_THROW(eval_flow_capacity_bound(ing, 1.5), InvalidArgument);
}
