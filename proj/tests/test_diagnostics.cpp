#include <cmath>

#include <doctest.h>

#include "tiknest/diagnostics.hpp"

using namespace tiknest;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

std::vector<Objective> benchmarks() {
  Matrix A(3, 3);
  A << 2, 0, 0, 0, 1, 1, 0, 1, 1;
  return {paper_quadratic(1.0, 5.0), shifted_quadratic(Eigen::Vector3d(1.0, -2.0, 0.5)),
          psd_quadratic(A, Eigen::Vector3d(2.0, 1.0, 1.0))};
}

SolverConfig criterion_config(Index iters) {
  Objective f = paper_quadratic(1.0, 5.0);
  Schedule s = Schedule::polynomial({1.0, 0.8, 1.0, 1.5}, 0.9 / f.lipschitz(), f.lipschitz());
  return SolverConfig{f, s, v2(1.0, -1.0), v2(-1.0, 1.0), iters, Variant::full, 1};
}

}  // namespace

TEST_CASE("lemmas hold on the benchmarks") {
  const SamplingOptions opts{2000, 10.0, 1};
  for (const Objective& f : benchmarks()) {
    CHECK(check_descent_lemma(f, opts).pass());
    CHECK(check_gradient_inequality(f, opts).pass());
    const auto md = check_modified_descent(f, 1.0 / f.lipschitz(), opts);
    CHECK(md.pass());
    CHECK(md.f3.samples == 2000);
  }
}

TEST_CASE("an understated Lipschitz constant is detected") {
  const Objective real = paper_quadratic(1.0, 5.0);
  Objective wrong("understated", 2, [real](const Vector& x) { return real.value(x); },
                  [real](const Vector& x) { return real.gradient(x); }, 5.0);
  CHECK_FALSE(check_descent_lemma(wrong, {500, 10.0, 3}).pass());
}

TEST_CASE("modified descent requires s <= 1/L") {
  const Objective f = paper_quadratic(1.0, 5.0);
  CHECK_THROWS_AS(check_modified_descent(f, 1.0), PreconditionError);
  CHECK_THROWS_AS(check_modified_descent(f, 0.0), PreconditionError);
}

TEST_CASE("regularization path bounds") {
  const Objective f = shifted_quadratic(Eigen::Vector3d(1.0, -2.0, 0.5));
  std::vector<double> eps;
  for (int i = 0; i < 50; ++i) eps.push_back(std::pow(10.0, 1.0 - 6.0 * i / 49.0));
  const PathBoundReport r = check_path_bounds(f, eps);
  CHECK(r.pass());
  CHECK(r.path_step.samples == 49);
  CHECK(r.last_distance < r.first_distance);
  std::vector<double> bad{1.0, 2.0};
  CHECK_THROWS_AS(check_path_bounds(f, bad), PreconditionError);
}

TEST_CASE("Lyapunov quantities") {
  const SolverConfig cfg = criterion_config(3000);
  const Schedule& s = cfg.schedule;
  CHECK_THROWS_AS(eta(s, 1, cfg.x1, cfg.x1), DegenerateWeightError);
  const Schedule tiny = Schedule::polynomial({0.001, 0.8, 1.0, 1.5}, 0.1, 4.0);
  CHECK_THROWS_AS(eta(tiny, 2, cfg.x1, cfg.x1), DegenerateWeightError);

  const Schedule ref = Schedule::polynomial({1.0, 0.8, 1.0, 1.5}, 0.1, 4.0);
  CHECK(p_coef(ref, 2) == doctest::Approx(12.363237533056819).epsilon(1e-14));

  const Trace t = run(cfg);
  const LyapunovReport r = lyapunov_analysis(t, s, cfg.objective);
  CHECK(r.pairs_checked == 2998);
  CHECK(r.max_eta_residual <= 1e-10);
  CHECK(r.descent_along_trace.pass());
  CHECK(r.gap_to_distance.pass());
  CHECK_FALSE(r.energy_samples.empty());

  SolverConfig ablated = cfg;
  ablated.variant = Variant::drop_c;
  ablated.max_iter = 10;
  CHECK_THROWS_AS(lyapunov_analysis(run(ablated), s, cfg.objective), PreconditionError);
}

TEST_CASE("rate report structure") {
  SolverConfig cfg = criterion_config(50);
  CHECK_THROWS_AS(rate_report(run(cfg), cfg.schedule, cfg.objective), InsufficientDataError);
  cfg.max_iter = 5000;
  const RateReport r = rate_report(run(cfg), cfg.schedule, cfg.objective);
  CHECK(r.horizon == 5000);
  CHECK(r.verdicts.size() == 6);
  for (const char* name : {"min_norm", "gap_o_eps", "value_O_eps", "velocity_o_sqrt_eps",
                           "gradient_o_sqrt_eps", "energy_o_q2eps"}) {
    CHECK_NOTHROW(r.get(name));
  }
  CHECK_THROWS_AS(r.get("nope"), PreconditionError);
  CHECK(format_rate_report(r).find("min_norm") != std::string::npos);
}
