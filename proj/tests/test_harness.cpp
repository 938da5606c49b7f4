#include "fixtures.hpp"

#include "harness.hpp"

#include <doctest.h>

#include <cmath>

using namespace toric;

namespace {

std::string plan(const std::string& fan, const std::string& kind, const std::string& B, const std::string& params) {
  return R"({"fan":")" + fan + R"(.json","kind":")" + kind + R"(","B":)" + B + R"(,"params":)" + params + "}";
}

ExperimentResult run(const std::string& text) { return run_plan_text(text, data_path("fans")); }

} // namespace

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(run(plan("p1", "manin", "[100,10]", "{}")), Error);
  CHECK_THROWS_AS(run(plan("p1", "manin", "[100,1000]", "{}")), Error); // fit needs 3 points
  CHECK_NOTHROW(run(plan("p1", "manin", "[100,1000]", R"({"fit":false})")));
  CHECK_THROWS_AS(run(plan("p1", "bogus", "[100]", "{}")), Error);
  CHECK_THROWS_AS(run(plan("p1", "geom_sieve", "[100]", "{}")), Error);
  CHECK_THROWS_AS(run(plan("p1", "equidist", "[100]", R"({"fit":false})")), Error);
  CHECK_THROWS_AS(run(plan("missing", "manin", "[100]", R"({"fit":false})")), Error);
  CHECK_THROWS_AS(run("{not json"), Error);
  CHECK_THROWS_AS(run(R"({"fan":"p1.json","kind":"manin","B":[10],"colour":1})"), Error);
}

TEST_CASE("manin on P1") {
  ExperimentResult r = run(plan("p1", "manin", "[100,1000,10000]", "{}"));
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[2].count == 6087);
  // predicted B / zeta(2)
  CHECK(std::abs(r.rows[2].reference - 10000 / 1.6449340668482264) < 0.5);
  CHECK(std::abs(r.rows[2].ratio - 1) < 0.002);
  REQUIRE(r.fit.has_value());
  CHECK(r.csv.rfind("B,param,count,reference_curve_value,ratio\n", 0) == 0);
  CHECK(r.summary_json.find("\"alpha\": \"1/2\"") != std::string::npos);
}

TEST_CASE("equidist with l = 1 reproduces per-cone manin counts") {
  ExperimentResult m = run(plan("p1xp1", "manin", "[1000,3000,10000]", R"({"cone":1})"));
  ExperimentResult e =
      run(plan("p1xp1", "equidist", "[1000,3000,10000]", R"({"cone":1,"classes":[{"l":1,"xi":[0,0,0,0]}]})"));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(m.rows[i].count == e.rows[2 * i + 1].count);
    CHECK(e.rows[2 * i + 1].param == "sum");
  }
}

TEST_CASE("congruence additivity") {
  for (u64 l : {2, 3}) {
    std::string classes = "[";
    for (u64 a = 0; a < l; ++a)
      for (u64 b = 0; b < l; ++b) classes += (classes.size() > 1 ? "," : "") + std::string(R"({"l":)") + std::to_string(l) +
                                              R"(,"xi":[)" + std::to_string(a) + "," + std::to_string(b) + "]}";
    classes += "]";
    ExperimentResult e = run(plan("p1", "equidist", "[1000]", R"({"fit":false,"classes":)" + classes + "}"));
    ExperimentResult m = run(plan("p1", "manin", "[1000]", R"({"fit":false,"cone":0})"));
    CHECK(e.rows.back().count == m.rows.back().count);
  }
}

TEST_CASE("inadmissible classes are empty") {
  auto p1 = test_fan("p1");
  CHECK_FALSE(class_is_admissible(p1, {2, {0, 0}}));
  CHECK(class_is_admissible(p1, {2, {1, 0}}));
  CHECK(class_is_admissible(p1, {6, {3, 2}}));
  CHECK_FALSE(class_is_admissible(p1, {6, {0, 2}}));
  CHECK(equidist_constant(p1, {2, {0, 0}}, {Rat(1)}, 1000) == 0);
  ExperimentResult e = run(plan("p1", "equidist", "[10000]", R"({"fit":false,"classes":[{"l":2,"xi":[0,0]}]})"));
  CHECK(e.rows.back().count == 0);
  CHECK(e.csv.find("NA") != std::string::npos);
}

TEST_CASE("other experiment kinds") {
  ExperimentResult f = run(plan("p1", "flat_complement", "[4,100]", R"({"A":1})"));
  CHECK(f.rows[0].count == 3);
  ExperimentResult g = run(plan("p2", "geom_sieve", "[8,1000]", R"({"f":"X0","g":"X1","N":[2,3]})"));
  CHECK(g.rows[0].count == 2);
  CHECK(g.rows[1].count == 0);
  ExperimentResult s = run(plan("p2", "subvariety", "[8]", R"({"phi":["X0 - X1","1"]})"));
  CHECK(s.rows[0].count == 4);
  CHECK(s.rows[1].count == 0);
  ExperimentResult p = run(plan("p1", "prime_section", "[100]", R"({"s":"X0"})"));
  CHECK(p.rows[0].count == 29);
}

TEST_CASE("fit recovers a synthetic model") {
  std::vector<std::pair<u64, u64>> pts;
  for (u64 B : {10000, 100000, 1000000}) {
    double L = std::log(static_cast<double>(B));
    pts.emplace_back(B, static_cast<u64>(std::llround(static_cast<double>(B) * (0.25 * L + 0.5))));
  }
  FitReport fr = fit_leading_constant(pts, 2, 0.25);
  CHECK(std::abs(fr.c1 - 0.25) < 1e-4);
  CHECK(std::abs(fr.c2 - 0.5) < 1e-3);
  CHECK(fr.deviation < 1e-3);
}

TEST_CASE("determinism") {
  std::string text = plan("p1xp1", "equidist", "[500,1000,2000]",
                          R"({"cone":0,"lambda":["1/2","1"],"classes":[{"l":3,"xi":[1,2,1,1]},{"l":3,"xi":[2,2,1,0]}]})");
  ExperimentResult a = run(text), b = run(text);
  CHECK(a.csv == b.csv);
  CHECK(a.summary_json == b.summary_json);
}
