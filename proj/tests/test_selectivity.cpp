#include <doctest.h>

#include <cmath>

#include "optomech/errors.hpp"
#include "optomech/selectivity.hpp"

using namespace optomech;

namespace {

SystemParams at_eta(double eta) {
  SystemParams p;
  p.omega_m = 1.0 / eta;
  return p;
}

}  // namespace

TEST_CASE("reference detunings") {
  CHECK(*reference_detuning(0.1, 1) == -9.7);
  CHECK(*reference_detuning(0.1, 2) == -9.6);
  CHECK(*reference_detuning(0.3, 1) == -7.5);
  CHECK(*reference_detuning(0.3, 2) == -6.6);
  CHECK(*reference_detuning(1.0 / 3.3333333, 1) == -7.5);
  CHECK_FALSE(reference_detuning(0.2, 1).has_value());
  CHECK_FALSE(reference_detuning(0.1, 3).has_value());
}

TEST_CASE("default bracket stays inside the pole-free interval") {
  const Bracket b = default_bracket(at_eta(0.1), 1);
  CHECK(b.hi == doctest::Approx(-9.2));
  CHECK(b.lo > -10.0);
  CHECK(b.lo < -9.99);
  CHECK_THROWS_AS(default_bracket(at_eta(0.2), 1), ParameterError);
}

TEST_CASE("solved root satisfies the resonance condition") {
  const SystemParams p = at_eta(0.1);
  const SelectivityReport r = solve_detuning(p, 1, default_bracket(p, 1));
  CHECK(r.residual < 1e-9);
  CHECK(r.delta_a > r.bracket->lo);
  CHECK(r.delta_a < r.bracket->hi);
  SystemParams q = p;
  q.delta_a = r.delta_a;
  CHECK(std::abs(phi_n(q, 1)) < 1e-9);
  CHECK(r.levels.size() == 7);
  CHECK(r.levels[1].n == 1);
  CHECK(std::abs(r.levels[1].phi_n) < 1e-9);
  CHECK(r.conditions.size() == 5);
  CHECK_FALSE(r.k_series_converged);
  CHECK(r.iterations > 0);

  // Refining the bracket around the same root keeps the answer.
  const SelectivityReport narrow = solve_detuning(p, 1, {r.delta_a - 1e-3, r.delta_a + 2e-3});
  CHECK(std::abs(narrow.delta_a - r.delta_a) < 1e-12);
}

TEST_CASE("bracket validation") {
  const SystemParams p = at_eta(0.1);
  CHECK_THROWS_AS(solve_detuning(p, 1, {-11.0, -9.0}), InvalidBracketError);
  CHECK_THROWS_AS(solve_detuning(p, 1, {-1.0, 1.0}), InvalidBracketError);
  CHECK_THROWS_AS(solve_detuning(p, 1, {9.0, 11.0}), InvalidBracketError);
  CHECK_THROWS_AS(solve_detuning(p, 1, {-5.0, -6.0}), InvalidBracketError);
  try {
    solve_detuning(p, 1, {-8.0, -6.0});
    FAIL("expected BracketError");
  } catch (const BracketError& e) {
    CHECK(std::isfinite(e.phi_lo()));
    CHECK(std::isfinite(e.phi_hi()));
    CHECK(std::signbit(e.phi_lo()) == std::signbit(e.phi_hi()));
  }
}

TEST_CASE("sign-change scan skips poles") {
  const SystemParams p = at_eta(0.1);
  const auto found = scan_sign_changes(p, 1, {-30.0, 30.0}, 6000);
  CHECK_FALSE(found.empty());
  for (const Bracket& b : found) {
    for (double pole : {-10.0, 0.0, 10.0}) CHECK_FALSE((pole >= b.lo && pole <= b.hi));
    const SelectivityReport r = solve_detuning(p, 1, b);
    CHECK(r.residual < 1e-9);
  }
  CHECK_THROWS_AS(scan_sign_changes(p, 1, {1.0, 0.0}), ParameterError);
}

TEST_CASE("condition audit flags") {
  SystemParams p = at_eta(0.1);
  p.delta_a = -9.7;
  const SelectivityReport r = audit_conditions(p, 1);
  REQUIRE(r.conditions.size() == 5);
  CHECK(r.conditions[0].value == doctest::Approx(1.0 / 19.7));
  CHECK(r.conditions[0].flag == ConditionFlag::ok);
  CHECK(r.conditions[1].value == doctest::Approx(3.0 / 9.7));
  CHECK(r.conditions[1].flag == ConditionFlag::warn);
  CHECK(r.conditions[3].value == doctest::Approx(0.3 / 0.3));
  CHECK(r.conditions[3].flag == ConditionFlag::fail);
  CHECK(r.truncation_ratio > 0.0);
  CHECK(r.truncation_ratio < 1.0);
  CHECK(to_string(ConditionFlag::warn) == "WARN");

  const SelectivityReport strict = audit_conditions(p, 1, ConditionThresholds{0.01, 0.02});
  CHECK(strict.conditions[0].flag == ConditionFlag::fail);
}

TEST_CASE("audit at a pole reports infinite ratios") {
  SystemParams p = at_eta(0.1);
  p.delta_a = 10.0;
  const SelectivityReport r = audit_conditions(p, 1);
  CHECK(std::isinf(r.conditions[2].value));
  CHECK(r.conditions[2].flag == ConditionFlag::fail);
  CHECK(std::isinf(r.residual));
}
