#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cbp/structure.hpp"
#include "fixtures.hpp"

using namespace cbp;

TEST_CASE("bang-bang verdicts for known pairs") {
  auto v = check_bang_bang(fixtures::convex_revenue());
  CHECK(v.is_bang_bang);
  CHECK(v.reason == BangBangReason::PowerExponentDominance);

  auto same = fixtures::concave_revenue();
  same.r = same.f;
  v = check_bang_bang(same);
  CHECK(v.is_bang_bang);
  CHECK(v.reason == BangBangReason::EqualFunctions);

  v = check_bang_bang(fixtures::concave_revenue());
  CHECK_FALSE(v.is_bang_bang);
  CHECK(v.reason == BangBangReason::NotDetected);
  // q(s) = s^-1.5: q(1) - q(0.5) < 0 already exceeds the failure tolerance.
  CHECK(1.0 - std::pow(0.5, -1.5) < 0.0);
  CHECK(v.worst_ratio_gap < -1e-12);
}

TEST_CASE("convex revenue with concave deterioration and demand-penalty shortcuts") {
  auto inst = fixtures::concave_revenue();
  inst.r = RateFunction::power(3.0, 1.5);
  inst.f = RateFunction::power(2.0, 0.9);
  auto v = check_bang_bang(inst);
  CHECK(v.is_bang_bang);
  CHECK(v.reason == BangBangReason::PowerExponentDominance);

  inst.r = RateFunction::demand_penalty(2.0, 1.0, 0.5);
  v = check_bang_bang(inst);
  CHECK(v.is_bang_bang);
  CHECK(v.reason == BangBangReason::ConvexConcave);

  // Concave demand-penalty revenue with linear deterioration: gap negative.
  inst.r = RateFunction::demand_penalty(0.0, 1.0, 0.5);
  inst.f = RateFunction::power(1.0, 1.0);
  v = check_bang_bang(inst);
  CHECK_FALSE(v.is_bang_bang);
}

TEST_CASE("ratio-test fallback covers cases the shortcuts miss") {
  auto inst = fixtures::concave_revenue();
  inst.r = RateFunction::demand_penalty(4.0, 1.5, 0.5);
  inst.f = RateFunction::power(1.0, 1.0);
  auto v = check_bang_bang(inst);
  CHECK(v.is_bang_bang);
  CHECK(v.reason == BangBangReason::ConvexConcave);

  inst.r = RateFunction::demand_penalty(0.5, 1.0, 0.2);
  inst.f = RateFunction::power(1.0, 0.5);
  v = check_bang_bang(inst);
  // Concave revenue against concave f, so only the grid decides. Above the demand
  // (r(s) - r(0)) / sqrt(s) = (0.1 + 0.5 s) / sqrt(s) is increasing for s >= 0.2.
  CHECK(v.is_bang_bang);
  CHECK(v.reason == BangBangReason::RatioTestGrid);
  CHECK(v.worst_ratio_gap >= -kRatioTolerance);
}

TEST_CASE("verdict ignores the base rate") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto inst = fixtures::random_instance(rng);
    const auto a = check_bang_bang(inst);
    const auto b = check_bang_bang(inst.with_lambda(inst.lambda * 7.5));
    CHECK(a.is_bang_bang == b.is_bang_bang);
    CHECK(a.reason == b.reason);
    CHECK(a.worst_ratio_gap == b.worst_ratio_gap);
  }
}

TEST_CASE("positive verdicts are sound against the full action grid") {
  std::mt19937_64 rng(17);
  int positives = 0;
  for (int i = 0; i < 30; ++i) {
    const auto inst = fixtures::random_instance(rng);
    if (!check_bang_bang(inst).is_bang_bang) continue;
    ++positives;
    auto g = default_grid(inst);
    g.dt *= 4;
    g.action_set = ActionSet::Full;
    const auto sol = solve(inst, g);
    const double cell = sol.action_step() + 1e-12;
    for (double s : sol.raw_policy()) CHECK((s <= cell || s >= inst.s_max - cell));
  }
  CHECK(positives > 5);
}

TEST_CASE("switching curve on bang-bang solutions") {
  const auto lo = solve(fixtures::convex_revenue(1.0), fixtures::grid());
  const auto hi = solve(fixtures::convex_revenue(4.0), fixtures::grid());
  const auto c_lo = extract_switching_curve(lo);
  const auto c_hi = extract_switching_curve(hi);
  REQUIRE(c_lo.threshold.size() == static_cast<std::size_t>(lo.steps()) + 1);
  for (std::size_t n = 0; n < c_lo.threshold.size(); ++n) {
    CHECK(c_hi.threshold[n] <= c_lo.threshold[n]);
    if (n > 0) {
      CHECK(c_lo.threshold[n] >= c_lo.threshold[n - 1]);
      CHECK(c_hi.threshold[n] >= c_hi.threshold[n - 1]);
    }
  }
}

TEST_CASE("constant maintenance cost never switches off before failure") {
  auto inst = fixtures::convex_revenue();
  inst.cost = CostFunction::two_level(10, 3.0, 3.0);
  const auto sol = solve(inst, fixtures::grid());
  const auto curve = extract_switching_curve(sol);
  for (int t : curve.threshold) CHECK(t == 10);

  // Two-state hand recursion: with equal costs, delta stays 0 and s = s_max is optimal.
  const double expected = -3.0;
  CHECK(sol.value(9, 1) == doctest::Approx(expected + 0.005 * 1.0));
}

TEST_CASE("interior rates are rejected by the switching-curve extractor") {
  const auto sol = solve(fixtures::concave_revenue(), fixtures::grid());
  CHECK_THROWS_AS(extract_switching_curve(sol), Error);
  try {
    extract_switching_curve(sol);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotBangBangSolution);
  }
}

TEST_CASE("structure report on the concave-revenue pair") {
  std::vector<SolutionGrid> sols;
  sols.push_back(solve(fixtures::concave_revenue(1.0), fixtures::grid()));
  sols.push_back(solve(fixtures::concave_revenue(4.0), fixtures::grid()));
  const auto report = verify_structure(sols);
  for (const auto& p : report.properties) {
    if (p.property == "submodular_x_lambda") continue;
    INFO(p.property << " violation " << p.max_violation << " at x=" << p.x << " n=" << p.n);
    CHECK(p.pass);
    CHECK_FALSE(p.skipped);
  }
  CHECK(report.find("weighted_delta_lambda")->pass);
}

TEST_CASE("delta below failure shrinks as the base rate grows") {
  // J(xi) = -cu for every lambda and J(xi - 1) falls with lambda, so
  // delta(xi - 1) = J(xi - 1) + cu must fall too.
  std::vector<SolutionGrid> sols;
  sols.push_back(solve(fixtures::concave_revenue(1.0), fixtures::grid()));
  sols.push_back(solve(fixtures::concave_revenue(4.0), fixtures::grid()));
  const int n = sols[0].steps();
  CHECK(sols[0].value(10, n) == sols[1].value(10, n));
  CHECK(sols[1].value(9, n) < sols[0].value(9, n));
  const auto report = verify_structure(sols);
  const auto* sub = report.find("submodular_x_lambda");
  REQUIRE(sub != nullptr);
  CHECK_FALSE(sub->pass);
  CHECK(sub->x == 9);
  CHECK(sub->max_violation == doctest::Approx(sols[0].value(9, n) - sols[1].value(9, n)));
  CHECK_FALSE(report.all_pass());
}

TEST_CASE("injected fault is located") {
  const auto clean = solve(fixtures::concave_revenue(), fixtures::grid(0.01));
  auto values = clean.raw_values();
  const int x = 4;
  const int n = 200;
  values[static_cast<std::size_t>(n) * 11 + x] += 1.0;
  const SolutionGrid bad(clean.instance(), clean.dt(), clean.steps(), clean.action_step(), values, clean.raw_policy());
  const auto report = verify_structure({bad});
  const auto* concave = report.find("concave_x");
  REQUIRE(concave != nullptr);
  CHECK_FALSE(concave->pass);
  CHECK(concave->n == n);
  // A raised value bends the curve convex on both sides of x.
  CHECK((concave->x == x - 2 || concave->x == x));
  CHECK(concave->max_violation > 0.5);
}

TEST_CASE("single grid skips lambda comparisons") {
  const auto report = verify_structure({solve(fixtures::concave_revenue(), fixtures::grid(0.01))});
  CHECK(report.find("value_monotone_lambda")->skipped);
  CHECK(report.find("policy_monotone_lambda")->skipped);
  CHECK_FALSE(report.find("concave_t")->skipped);
  CHECK(report.all_pass());
}

TEST_CASE("incompatible grids are refused") {
  std::vector<SolutionGrid> sols;
  sols.push_back(solve(fixtures::concave_revenue(1.0), fixtures::grid(0.01)));
  sols.push_back(solve(fixtures::concave_revenue(1.0), fixtures::grid(0.005)));
  CHECK_THROWS_AS(verify_structure(sols), Error);
  CHECK_THROWS_AS(verify_structure({}), Error);
}

TEST_CASE("random instances satisfy every structural property") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const auto inst = fixtures::random_instance(rng);
    auto g = default_grid(inst.with_lambda(inst.lambda * 2));
    g.dt = std::min(g.dt * 2, 0.01);
    std::vector<SolutionGrid> sols;
    sols.push_back(solve(inst, g));
    sols.push_back(solve(inst.with_lambda(inst.lambda * 2), g));
    const auto report = verify_structure(sols);
    for (const auto& p : report.properties) {
      if (p.property == "submodular_x_lambda") continue;
      INFO("instance " << i << " " << p.property << " violation " << p.max_violation);
      CHECK(p.pass);
    }
  }
}

TEST_CASE("report writers") {
  const auto report = verify_structure({solve(fixtures::concave_revenue(), fixtures::grid(0.01))});
  std::ostringstream csv;
  write_structure_csv(report, csv);
  CHECK(csv.str().rfind("property,pass,max_violation,x,n,lambda\n", 0) == 0);
  std::ostringstream table;
  write_structure_table(report, table);
  CHECK(table.str().find("concave_x") != std::string::npos);
}
