#include "tiknest/solver.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <sstream>
#include <utility>

namespace tiknest {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full:
      return "full";
    case Variant::drop_eps:
      return "drop_eps";
    case Variant::drop_c:
      return "drop_c";
    case Variant::drop_both:
      return "drop_both";
  }
  return "full";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::full, Variant::drop_eps, Variant::drop_c, Variant::drop_both}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected full, drop_eps, drop_c or drop_both)");
}

Index default_record_stride(Index max_iter) {
  if (max_iter < 1000) return 1;
  return (max_iter + 9999) / 10000;
}

DivergenceError::DivergenceError(Index k, Trace partial)
    : Error("iteration diverged: non-finite values at k = " + std::to_string(k)),
      k_(k),
      partial_(std::move(partial)) {}

StepCoefficients step_coefficients(const Schedule& sched, Variant variant, Index k) {
  if (k < 1) throw IndexError("step_coefficients: index must be >= 1");
  const bool keep_eps = variant == Variant::full || variant == Variant::drop_c;
  StepCoefficients coef;
  coef.eps = keep_eps ? sched.eps_at(k) : 0.0;
  if (k == 1) return coef;

  const double s = sched.s();
  if (keep_eps) {
    coef.b = b_coef(sched, k);
    coef.c = variant == Variant::full ? c_coef(sched, k) : 0.0;
  } else {
    const double q_prev = sched.q_at(k - 1);
    const double q_k = sched.q_at(k);
    coef.b = inertial_coefficient(s, 0.0, 0.0, q_prev, q_k);
    coef.c = variant == Variant::drop_eps ? 2.0 * s * s / (q_prev * q_k) : 0.0;
  }
  return coef;
}

namespace {

Vector extrapolate(const StepCoefficients& coef, const Vector& x_prev, const Vector& x_curr) {
  if (x_prev.size() != x_curr.size()) throw PreconditionError("step: dimension mismatch");
  return x_curr + coef.b * (x_curr - x_prev) - coef.c * x_curr;
}

void require_finite(const StepResult& r, Index k) {
  if (!r.y.allFinite() || !r.x_next.allFinite()) throw DivergenceError(k, Trace{});
}

}  // namespace

StepResult step_with(const Objective& obj, double s, const StepCoefficients& coef,
                     const Vector& x_prev, const Vector& x_curr) {
  StepResult r;
  r.y = extrapolate(coef, x_prev, x_curr);
  r.x_next = (1.0 - s * coef.eps) * r.y - s * obj.gradient(r.y);
  return r;
}

StepResult step_equivalent_with(const Objective& obj, double s, const StepCoefficients& coef,
                                const Vector& x_prev, const Vector& x_curr) {
  StepResult r;
  r.y = extrapolate(coef, x_prev, x_curr);
  r.x_next = r.y - s * regularized_gradient(obj, coef.eps, r.y);
  return r;
}

StepResult step(const Vector& x_prev, const Vector& x_curr, Index k, const SolverConfig& cfg) {
  auto r = step_with(cfg.objective, cfg.s(), step_coefficients(cfg.schedule, cfg.variant, k),
                     x_prev, x_curr);
  require_finite(r, k);
  return r;
}

StepResult step_equivalent(const Vector& x_prev, const Vector& x_curr, Index k,
                           const SolverConfig& cfg) {
  auto r = step_equivalent_with(cfg.objective, cfg.s(),
                                step_coefficients(cfg.schedule, cfg.variant, k), x_prev, x_curr);
  require_finite(r, k);
  return r;
}

namespace {

void validate(const SolverConfig& cfg) {
  const Index n = cfg.objective.dimension();
  if (cfg.x0.size() != n || cfg.x1.size() != n) {
    throw PreconditionError("solver: x0 and x1 must have dimension " + std::to_string(n));
  }
  if (cfg.max_iter < 1) throw PreconditionError("solver: max_iter must be positive");
  if (cfg.record_every < 0) throw PreconditionError("solver: record_every must be >= 0");
}

std::string summarize(const SolverConfig& cfg) {
  std::ostringstream out;
  out << cfg.objective.name() << " variant=" << to_string(cfg.variant) << " s=" << cfg.s()
      << " max_iter=" << cfg.max_iter;
  if (const auto& pp = cfg.schedule.polynomial_params()) {
    out << " a=" << pp->a << " q=" << pp->q_exp << " c=" << pp->c << " p=" << pp->p_exp;
  }
  return out.str();
}

std::vector<std::string> schedule_warnings(const SolverConfig& cfg) {
  std::vector<std::string> out;
  const Schedule& sched = cfg.schedule;
  const double sl = cfg.s() * cfg.objective.lipschitz();
  if (sl >= 1.0) {
    std::ostringstream msg;
    msg << "step size exceeds 1/L (s*L = " << sl << ")";
    out.push_back(msg.str());
  }
  if (cfg.max_iter >= sched.k1()) {
    if (!find_k2(sched, cfg.max_iter)) {
      out.push_back("(Q) not yet satisfied at horizon k = " + std::to_string(cfg.max_iter));
    }
    if (cfg.max_iter >= std::max<Index>(2, sched.k1())) {
      const auto hyp = check_theorem2_hypotheses(sched, cfg.max_iter);
      for (const auto& c : hyp.checks) {
        if (!c.pass) out.push_back("hypothesis " + c.name + " failed: " + c.detail);
      }
    }
  }
  return out;
}

IterateRecord make_record(const SolverConfig& cfg, Index k, const Vector& x_prev,
                          const Vector& x, const Vector& y, const Vector& grad_y,
                          const StepCoefficients& coef) {
  const Objective& obj = cfg.objective;
  IterateRecord rec;
  rec.k = k;
  rec.x = x;
  rec.y = y;
  rec.f_x = obj.value(x);
  rec.f_y = obj.value(y);
  rec.grad_norm_x = obj.gradient(x).norm();
  rec.grad_norm_y = grad_y.norm();
  rec.velocity = (x - x_prev).norm();
  rec.dist_xstar = obj.oracle() ? (x - obj.oracle()->x_star).norm() : std::nan("");
  rec.eps_k = coef.eps;
  rec.b_k = coef.b;
  rec.c_k = coef.c;
  return rec;
}

bool finite_record(const IterateRecord& r) {
  return std::isfinite(r.f_x) && std::isfinite(r.f_y) && std::isfinite(r.grad_norm_x) &&
         std::isfinite(r.grad_norm_y) && std::isfinite(r.velocity);
}

}  // namespace

Trace run(const SolverConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  Trace trace;
  trace.summary = summarize(cfg);
  trace.variant = cfg.variant;
  trace.warnings = schedule_warnings(cfg);

  const Index stride = cfg.record_every > 0 ? cfg.record_every : default_record_stride(cfg.max_iter);
  trace.records.reserve(static_cast<std::size_t>(cfg.max_iter / stride + 2));

  const Objective& obj = cfg.objective;
  const double s = cfg.s();
  Vector x_prev = cfg.x0;
  Vector x = cfg.x1;

  auto fail = [&](Index k) {
    trace.final_x = x;
    trace.iterations = k - 1;
    trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.warnings.push_back("diverged at k = " + std::to_string(k));
    throw DivergenceError(k, std::move(trace));
  };

  for (Index k = 1; k <= cfg.max_iter; ++k) {
    const StepCoefficients coef = step_coefficients(cfg.schedule, cfg.variant, k);
    Vector y = x + coef.b * (x - x_prev) - coef.c * x;
    Vector grad_y = obj.gradient(y);
    Vector x_next = (1.0 - s * coef.eps) * y - s * grad_y;
    if (!y.allFinite() || !grad_y.allFinite() || !x_next.allFinite()) fail(k);

    if (k == 1 || k == cfg.max_iter || (k - 1) % stride == 0) {
      IterateRecord rec = make_record(cfg, k, x_prev, x, y, grad_y, coef);
      if (!finite_record(rec)) fail(k);
      trace.records.push_back(std::move(rec));
    }
    x_prev = std::move(x);
    x = std::move(x_next);
  }

  trace.final_x = x;
  trace.iterations = cfg.max_iter;
  trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

std::vector<MatrixRun> run_matrix(const SolverConfig& base, std::span<const double> p_values) {
  if (p_values.empty()) throw PreconditionError("run_matrix: empty p list");
  const auto& pp = base.schedule.polynomial_params();
  if (!pp) throw PreconditionError("run_matrix: base schedule must be polynomial");

  std::vector<MatrixRun> runs;
  std::vector<SolverConfig> configs;
  for (double p : p_values) {
    PolyScheduleParams params = *pp;
    params.p_exp = p;
    SolverConfig cfg = base;
    cfg.schedule = Schedule::polynomial(params, base.s(), base.schedule.lipschitz());
    std::ostringstream label;
    label << "p=" << p;
    runs.push_back({label.str(), p, cfg.variant, {}, std::nullopt});
    configs.push_back(std::move(cfg));
  }
  SolverConfig baseline = base;
  baseline.variant = Variant::drop_both;
  runs.push_back({"baseline", std::nullopt, Variant::drop_both, {}, std::nullopt});
  configs.push_back(std::move(baseline));

  std::vector<std::future<void>> pending;
  pending.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    pending.push_back(std::async(std::launch::async, [&runs, &configs, i] {
      try {
        runs[i].trace = run(configs[i]);
      } catch (const DivergenceError& e) {
        runs[i].trace = e.partial();
        runs[i].error = e.what();
      } catch (const Error& e) {
        runs[i].error = e.what();
      }
    }));
  }
  for (auto& f : pending) f.get();
  return runs;
}

}  // namespace tiknest
