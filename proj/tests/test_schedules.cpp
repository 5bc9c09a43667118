#include <cmath>

#include <doctest.h>

#include "tiknest/schedules.hpp"

using namespace tiknest;

namespace {
// Reference values below were computed with 40-digit arithmetic.
const PolyScheduleParams kBase{1.0, 0.8, 1.0, 1.5};
Schedule base_schedule() { return Schedule::polynomial(kBase, 0.1, 4.0); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("polynomial schedule values") {
  const Schedule s = base_schedule();
  CHECK(rel(s.eps_at(5), 0.08944271909999159) < 1e-15);
  CHECK(rel(s.q_at(5), 3.623898318388478) < 1e-15);
  const Schedule small = Schedule::polynomial({0.04, 0.8, 1.0, 1.5}, 0.1, 4.0);
  CHECK(rel(small.q_at(32), 0.64) < 1e-15);
  CHECK_THROWS_AS(s.eps_at(0), IndexError);
  CHECK_THROWS_AS(s.q_at(-3), IndexError);
}

TEST_CASE("k0 and k1") {
  CHECK(k0_poly(kBase, 0.1, 4.0) == 1);
  CHECK(k0_poly({1.0, 0.8, 100.0, 1.5}, 0.1, 4.0) == 7);
  CHECK_THROWS_AS(k0_poly(kBase, 0.1, 10.0), ConditionSUnsatisfiableError);
  const Schedule s = Schedule::polynomial({1.0, 0.8, 100.0, 1.5}, 0.1, 4.0);
  CHECK(s.k0() == 7);
  CHECK(s.k1() == 7);
  CHECK(s.condition_s_holds());
  for (Index k = s.k0(); k < s.k0() + 50; ++k) CHECK(0.1 * (4.0 + s.eps_at(k)) <= 1.0);
  CHECK(0.1 * (4.0 + s.eps_at(s.k0() - 1)) > 1.0);

  const Schedule unstable = Schedule::polynomial(kBase, 0.1, 52.0);
  CHECK_FALSE(unstable.condition_s_holds());
  CHECK(unstable.k0() == 1);
}

TEST_CASE("generic schedule finds the same indices as the polynomial one") {
  const PolyScheduleParams pp{1.0, 0.8, 100.0, 1.5};
  const Schedule poly = Schedule::polynomial(pp, 0.1, 4.0);
  const Schedule gen = Schedule::generic(
      [](Index k) { return 100.0 / std::pow(double(k), 1.5); },
      [](Index k) { return std::pow(double(k), 0.8); }, 0.1, 4.0);
  CHECK(gen.k0() == poly.k0());
  CHECK(gen.k1() == poly.k1());
}

TEST_CASE("inertial and Tikhonov coefficients") {
  const Schedule s = base_schedule();
  CHECK(b_coef(s, 1) == 0.0);
  CHECK(c_coef(s, 1) == 0.0);
  CHECK(rel(b_coef(s, 2), 0.3631938396180508) < 1e-14);
  CHECK(rel(c_coef(s, 2), 0.004364417372035608) < 1e-13);
  CHECK(rel(b_coef(s, 1'000'000), 0.99999444532536561) < 1e-14);
  CHECK(rel(c_coef(s, 1'000'000), 5.0237768825703553e-12) < 1e-9);
  CHECK(inertial_coefficient(0.1, 0.0, 0.0, 0.0, 1.0) == 0.0);
  CHECK(tikhonov_coefficient(0.1, 0.0, 0.0, 1e-20, 1.0) == 0.0);
}

TEST_CASE("closed forms agree with the generic formulas") {
  const Schedule s = base_schedule();
  for (Index k : log_grid(2, 1'000'000, 60)) {
    CHECK(rel(bp_closed_form(kBase, 0.1, k), b_coef(s, k)) < 1e-10);
    CHECK(std::abs(cp_closed_form(kBase, 0.1, k) - c_coef(s, k)) <=
          1e-10 * std::abs(c_coef(s, k)) + 1e-14);
  }
}

TEST_CASE("condition Q") {
  const Schedule s = base_schedule();
  const QVerdict at1 = check_Q(s, 1);
  CHECK(rel(at1.inequality_value, 1.7436475066113639) < 1e-13);
  CHECK(rel(at1.lower_bound_margin, 0.7530864197530864) < 1e-14);
  CHECK_FALSE(at1.inequality);
  CHECK(at1.lower_bound);
  CHECK_FALSE(at1.holds());

  const QVerdict far = check_Q(s, 10'000'000);
  CHECK(rel(far.inequality_value, -14452.43158519966) < 1e-6);
  CHECK(far.holds());

  const Schedule q1 = Schedule::polynomial({0.04, 1.0, 1.0, 1.5}, 0.1, 4.0);
  const QVerdict v = check_Q(q1, 10'000);
  CHECK(rel(v.inequality_value, -8.0064096) < 1e-6);
  CHECK(rel(v.lower_bound_margin, 399.8) < 1e-6);
  CHECK(v.holds());

  CHECK_THROWS_AS(check_Q(Schedule::polynomial({1, 0.8, 100, 1.5}, 0.1, 4.0), 3),
                  PreconditionError);
}

TEST_CASE("find_k2 and kbar") {
  const Schedule s = Schedule::polynomial({0.04, 0.8, 1.0, 1.5}, 0.1, 4.0);
  REQUIRE(find_k2(s, 2000));
  CHECK(*find_k2(s, 2000) == 8);
  CHECK(*kbar_index(s, 2000) == 9);
  for (Index k = 8; k <= 2000; ++k) CHECK(check_Q(s, k).holds());
  CHECK_FALSE(check_Q(s, 7).holds());
  CHECK_THROWS_AS(find_k2(Schedule::polynomial({1, 0.8, 100, 1.5}, 0.1, 4.0), 3),
                  PreconditionError);
}

TEST_CASE("certification") {
  CHECK(describe_certification(kBase, 0.1) == "rate_certified: yes (0<p<2q)");
  CHECK(certify({1.0, 0.8, 1.0, 1.7}, 0.1) == Certification::uncertified);
  CHECK(describe_certification({1.0, 0.8, 1.0, 1.7}, 0.1).find("0<p<2q") != std::string::npos);
  CHECK(describe_certification({0.04, 1.0, 1.0, 1.5}, 0.1) == "q1_mode: a < s/2 holds");
  CHECK(certify({0.06, 1.0, 1.0, 1.5}, 0.1) == Certification::uncertified);
}

TEST_CASE("hypotheses of the strong-convergence theorem") {
  const Schedule good = Schedule::polynomial(kBase, 0.9 / 52.0, 52.0);
  const HypothesisReport r = check_theorem2_hypotheses(good, 1'000'000);
  CHECK(r.checks.size() == 4);
  CHECK(r.all_pass());
  const Schedule bad = Schedule::polynomial({1.0, 0.8, 1.0, 1.7}, 0.9 / 52.0, 52.0);
  const HypothesisReport rb = check_theorem2_hypotheses(bad, 1'000'000, 2);
  CHECK_FALSE(rb.get("q2eps_increasing").pass);
  CHECK_FALSE(rb.get("q2eps_divergent").pass);
}

TEST_CASE("index samplers") {
  const auto dense = sample_indices(3, 50);
  CHECK(dense.size() == 48);
  const auto sparse = sample_indices(1, 10'000'000);
  CHECK(sparse.front() == 1);
  CHECK(sparse.back() == 10'000'000);
  for (std::size_t i = 1; i < sparse.size(); ++i) CHECK(sparse[i] > sparse[i - 1]);
  const auto grid = log_grid(1, 1'000'000, 100);
  CHECK(grid.front() == 1);
  CHECK(grid.back() == 1'000'000);
}
