#include "tiknest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace tiknest {

double p_coef(const Schedule& sched, Index k) {
  if (k < sched.k1()) {
    throw PreconditionError("p_coef: k = " + std::to_string(k) + " < k1 = " +
                            std::to_string(sched.k1()));
  }
  const double s = sched.s();
  const double w = 1.0 - s * sched.eps_at(k);
  const double q = sched.q_at(k);
  return w * w * q * q / (2.0 * s) - q;
}

namespace {

struct EtaWeights {
  double on_diff;  // multiplies y_k - x_k
  double on_x;     // multiplies x_k
};

EtaWeights eta_weights(const Schedule& sched, Index k) {
  if (k < 2) throw DegenerateWeightError("eta: requires k >= 2");
  const double s = sched.s();
  const double q_prev = sched.q_at(k - 1);
  if (!(q_prev > s)) {
    throw DegenerateWeightError("eta: q_{k-1} = " + std::to_string(q_prev) + " <= s at k = " +
                                std::to_string(k));
  }
  const double damp = 1.0 - s / q_prev;
  const double w = 1.0 - s * sched.eps_at(k);
  const double q = sched.q_at(k);
  return {w * q / (2.0 * s * damp), 1.0 / (damp * w)};
}

// Norm of the uncancelled pieces of eta_k, used to scale recurrence residuals.
double eta_term_scale(const Schedule& sched, Index k, const Vector& x, const Vector& y) {
  const EtaWeights w = eta_weights(sched, k);
  return std::abs(w.on_diff) * y.norm() + std::abs(w.on_diff - w.on_x) * x.norm();
}

}  // namespace

Vector eta(const Schedule& sched, Index k, const Vector& x_k, const Vector& y_k) {
  const EtaWeights w = eta_weights(sched, k);
  return w.on_diff * (y_k - x_k) + w.on_x * x_k;
}

double energy(const Schedule& sched, const Objective& obj, Index k, const Vector& x_next,
              const Vector& eta_next, const Vector& x_star) {
  const double eps_next = sched.eps_at(k + 1);
  const TikhonovPoint bar = tikhonov_point(obj, eps_next);
  const double gap =
      regularized_value(obj, eps_next, x_next) - regularized_value(obj, eps_next, bar.point);
  return (p_coef(sched, k) + sched.q_at(k)) * gap + (eta_next - x_star).squaredNorm();
}

void InequalityCheck::record(double violation) {
  ++samples;
  if (std::isnan(violation)) {
    max_violation = std::numeric_limits<double>::infinity();
  } else {
    max_violation = std::max(max_violation, violation);
  }
}

namespace {

class PointSampler {
 public:
  PointSampler(Index dim, const SamplingOptions& opts)
      : dim_(dim), rng_(opts.seed), dist_(-opts.box, opts.box) {}

  Vector next() {
    Vector v(dim_);
    for (Index i = 0; i < dim_; ++i) v(i) = dist_(rng_);
    return v;
  }

 private:
  Index dim_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> dist_;
};

}  // namespace

InequalityCheck check_descent_lemma(const Objective& obj, const SamplingOptions& opts) {
  InequalityCheck check{"descent_lemma"};
  PointSampler sampler(obj.dimension(), opts);
  const double L = obj.lipschitz();
  for (Index i = 0; i < opts.samples; ++i) {
    const Vector x = sampler.next();
    const Vector y = sampler.next();
    const Vector gy = obj.gradient(y);
    const double rhs = obj.value(y) + gy.dot(x - y) + 0.5 * L * (y - x).squaredNorm();
    check.record(obj.value(x) - rhs);
  }
  return check;
}

InequalityCheck check_gradient_inequality(const Objective& obj, const SamplingOptions& opts) {
  InequalityCheck check{"gradient_inequality"};
  PointSampler sampler(obj.dimension(), opts);
  const double L = obj.lipschitz();
  for (Index i = 0; i < opts.samples; ++i) {
    const Vector x = sampler.next();
    const Vector y = sampler.next();
    const Vector gx = obj.gradient(x);
    const Vector gy = obj.gradient(y);
    const double lhs = (gy - gx).squaredNorm() / (2.0 * L) + gy.dot(x - y) + obj.value(y);
    check.record(lhs - obj.value(x));
  }
  return check;
}

ModifiedDescentReport check_modified_descent(const Objective& obj, double s,
                                             const SamplingOptions& opts) {
  const double L = obj.lipschitz();
  if (!(s > 0.0)) throw PreconditionError("check_modified_descent: s must be positive");
  if (s > 1.0 / L) {
    throw PreconditionError("check_modified_descent: s = " + std::to_string(s) +
                            " exceeds 1/L = " + std::to_string(1.0 / L));
  }
  ModifiedDescentReport report;
  report.f3.name = "modified_descent_f3";
  report.f4.name = "modified_descent_f4";
  PointSampler sampler(obj.dimension(), opts);
  for (Index i = 0; i < opts.samples; ++i) {
    const Vector x = sampler.next();
    const Vector y = sampler.next();
    const Vector gx = obj.gradient(x);
    const Vector gy = obj.gradient(y);
    const double lhs = obj.value(y - s * gy);
    const double common = obj.value(x) + gy.dot(y - x);
    const double g2 = gy.squaredNorm();
    const double d2 = (gy - gx).squaredNorm();
    const double rhs3 = common + (0.5 * L * s * s - s) * g2 - d2 / (2.0 * L);
    const double rhs4 = common - 0.5 * s * g2 - 0.5 * s * d2;
    report.f3.record(lhs - rhs3);
    report.f4.record(lhs - rhs4);
    const double scale =
        std::max(1.0, std::abs(obj.value(x)) + std::abs(gy.dot(y - x)) + s * g2 + s * d2 + d2 / L);
    report.worst_chain_gap = std::min(report.worst_chain_gap, (rhs4 - rhs3) / scale);
  }
  return report;
}

bool PathBoundReport::pass() const {
  return path_step.pass() && strong_convexity_gap.pass() && value_transfer.pass() &&
         norm_bound.pass() && norm_monotone.pass() && converging();
}

PathBoundReport check_path_bounds(const Objective& obj, std::span<const double> eps_list,
                                  const SamplingOptions& opts) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw PreconditionError("check_path_bounds: eps must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw PreconditionError("check_path_bounds: eps list must be strictly decreasing");
    }
  }
  PathBoundReport report;
  if (eps_list.empty()) return report;

  std::vector<Vector> path;
  path.reserve(eps_list.size());
  for (double e : eps_list) path.push_back(tikhonov_point(obj, e).point);

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double e0 = eps_list[i];
    const double e1 = eps_list[i + 1];
    const double bound =
        std::min((e0 - e1) / e1 * path[i].norm(), (e0 - e1) / e0 * path[i + 1].norm());
    report.path_step.record((path[i + 1] - path[i]).norm() - bound);
    report.norm_monotone.record(path[i].norm() - path[i + 1].norm());
  }

  PointSampler sampler(obj.dimension(), opts);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double e = eps_list[i];
    const double f_bar = regularized_value(obj, e, path[i]);
    for (Index j = 0; j < opts.samples; ++j) {
      const Vector x = sampler.next();
      const Vector y = sampler.next();
      const double gap = regularized_value(obj, e, x) - f_bar;
      report.strong_convexity_gap.record(0.5 * e * (x - path[i]).squaredNorm() - gap);
      report.value_transfer.record(obj.value(x) - obj.value(y) -
                                   (gap + 0.5 * e * y.squaredNorm()));
    }
  }

  if (const auto& oracle = obj.oracle()) {
    const double star_norm = oracle->x_star.norm();
    for (const Vector& p : path) report.norm_bound.record(p.norm() - star_norm);
    report.first_distance = (path.front() - oracle->x_star).norm();
    report.last_distance = (path.back() - oracle->x_star).norm();
  }
  return report;
}

LyapunovReport lyapunov_analysis(const Trace& trace, const Schedule& sched, const Objective& obj,
                                 Index max_energy_samples) {
  if (trace.variant != Variant::full) {
    throw PreconditionError("lyapunov_analysis: the recurrence holds only for the full variant");
  }
  const MinNormOracle& oracle = obj.require_oracle();
  const double s = sched.s();
  LyapunovReport report;
  const auto& recs = trace.records;

  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const IterateRecord& cur = recs[i];
    const IterateRecord& nxt = recs[i + 1];
    if (nxt.k != cur.k + 1) continue;
    const Index k = cur.k;
    const double eps = sched.eps_at(k);
    const Vector grad_fk_y = regularized_gradient(obj, eps, cur.y);

    if (k >= sched.k0()) {
      const Vector grad_fk_x = regularized_gradient(obj, eps, cur.x);
      const double rhs = regularized_value(obj, eps, cur.x) + grad_fk_y.dot(cur.y - cur.x) -
                         0.5 * s * grad_fk_y.squaredNorm() -
                         0.5 * s * (grad_fk_y - grad_fk_x).squaredNorm();
      report.descent_along_trace.record(regularized_value(obj, eps, nxt.x) - rhs);
    }

    if (k >= sched.k1() && check_Q(sched, k).holds()) {
      ++report.p_checked;
      report.min_p_where_q = std::min(report.min_p_where_q, p_coef(sched, k));
    }

    if (k < 2 || !(sched.q_at(k - 1) > s)) continue;
    const double damp = 1.0 - s / sched.q_at(k - 1);
    const double pull = (1.0 - s * eps) * sched.q_at(k) / 2.0;
    const Vector lhs = eta(sched, k + 1, nxt.x, nxt.y);
    const Vector rhs = damp * eta(sched, k, cur.x, cur.y) - pull * grad_fk_y;
    const double scale = eta_term_scale(sched, k + 1, nxt.x, nxt.y) +
                         damp * eta_term_scale(sched, k, cur.x, cur.y) +
                         pull * grad_fk_y.norm();
    const double residual = scale > 0.0 ? (lhs - rhs).norm() / scale : (lhs - rhs).norm();
    ++report.pairs_checked;
    if (residual > report.max_eta_residual) {
      report.max_eta_residual = residual;
      report.worst_eta_k = k;
    }
  }

  if (recs.empty()) return report;
  for (Index target : log_grid(std::max<Index>(2, recs.front().k), recs.back().k, max_energy_samples)) {
    auto it = std::lower_bound(recs.begin(), recs.end(), target,
                               [](const IterateRecord& r, Index k) { return r.k < k; });
    if (it == recs.end()) continue;
    const IterateRecord& rec = *it;
    const Index k = rec.k - 1;  // record k+1 carries x_{k+1}, y_{k+1}
    if (k < sched.k1() || k < 1 || !(sched.q_at(k) > s)) continue;
    if (!report.energy_samples.empty() && report.energy_samples.back().k == k) continue;

    const double eps_next = sched.eps_at(k + 1);
    const TikhonovPoint bar = tikhonov_point(obj, eps_next);
    const double gap =
        regularized_value(obj, eps_next, rec.x) - regularized_value(obj, eps_next, bar.point);
    report.gap_to_distance.record((rec.x - bar.point).squaredNorm() - 2.0 * gap / eps_next);

    EnergySample sample;
    sample.k = k;
    sample.energy = energy(sched, obj, k, rec.x, eta(sched, k + 1, rec.x, rec.y), oracle.x_star);
    const double q = sched.q_at(k);
    sample.ratio = sample.energy / (q * q * sched.eps_at(k));
    sample.q_holds = check_Q(sched, k).holds();
    if (sample.q_holds) report.min_energy_where_q = std::min(report.min_energy_where_q, sample.energy);
    report.energy_samples.push_back(sample);
  }
  return report;
}

bool RateReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

const ClaimVerdict& RateReport::get(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return v;
  }
  throw PreconditionError("no rate claim named " + name);
}

namespace {

class DecadeWindows {
 public:
  DecadeWindows(Index k_tail, Index horizon) : k_tail_(k_tail), horizon_(horizon) {}

  void add(Index k, double value, DecadeTrend& trend) const {
    if (k >= k_tail_ && k <= 10 * k_tail_) trend.first = std::max(trend.first, value);
    if (k >= horizon_ / 10 && k <= horizon_) trend.last = std::max(trend.last, value);
  }

 private:
  Index k_tail_;
  Index horizon_;
};

std::string trend_detail(const DecadeTrend& t) {
  std::ostringstream out;
  out << std::setprecision(6) << "first-decade max " << t.first << ", last-decade max " << t.last;
  return out.str();
}

ClaimVerdict big_o_claim(std::string name, const DecadeTrend& t, double sup) {
  return {std::move(name), std::isfinite(sup) && t.last <= t.first, trend_detail(t)};
}

ClaimVerdict little_o_claim(std::string name, const DecadeTrend& t) {
  return {std::move(name), std::isfinite(t.last) && t.last <= 0.5 * t.first, trend_detail(t)};
}

}  // namespace

RateReport rate_report(const Trace& trace, const Schedule& sched, const Objective& obj,
                       const RateOptions& opts) {
  const auto& recs = trace.records;
  if (recs.size() < 100) {
    throw InsufficientDataError("rate_report: need at least 100 records, trace has " +
                                std::to_string(recs.size()));
  }
  const MinNormOracle& oracle = obj.require_oracle();
  const double s = sched.s();

  RateReport report;
  report.horizon = recs.back().k;
  if (opts.k_tail) {
    report.k_tail = *opts.k_tail;
  } else {
    report.k_tail = report.horizon / 100;
    if (report.horizon >= sched.k1()) {
      if (auto kbar = kbar_index(sched, report.horizon)) {
        report.k_tail = std::max(report.k_tail, *kbar);
      } else {
        report.notes.push_back("(Q) not satisfied within the run; tail starts at N/100");
      }
    }
  }
  report.k_tail = std::max({report.k_tail, sched.k1() + 1, Index{2}});
  const DecadeWindows windows(report.k_tail, report.horizon);

  report.sup_f_over_eps = 0.0;
  for (const auto& r : recs) {
    if (r.k < report.k_tail) continue;
    const double eps = sched.eps_at(r.k);
    const double root = std::sqrt(eps);
    const double f_ratio = (r.f_x - oracle.min_value) / eps;
    const double fy_ratio = (r.f_y - oracle.min_value) / eps;
    report.sup_f_over_eps = std::max(report.sup_f_over_eps, f_ratio);
    windows.add(r.k, f_ratio, report.f_over_eps);
    windows.add(r.k, fy_ratio, report.fy_over_eps);
    windows.add(r.k, r.velocity / root, report.vel_ratio);
    windows.add(r.k, r.grad_norm_x / root, report.gradx_ratio);
    windows.add(r.k, r.grad_norm_y / root, report.grady_ratio);
  }

  Index last_k = -1;
  for (Index target : log_grid(report.k_tail, report.horizon, opts.max_oracle_samples)) {
    auto it = std::lower_bound(recs.begin(), recs.end(), target,
                               [](const IterateRecord& r, Index k) { return r.k < k; });
    if (it == recs.end() || it->k == last_k) continue;
    const IterateRecord& rec = *it;
    last_k = rec.k;

    const double eps = sched.eps_at(rec.k);
    const TikhonovPoint bar = tikhonov_point(obj, eps);
    const double gap = regularized_value(obj, eps, rec.x) - regularized_value(obj, eps, bar.point);
    windows.add(rec.k, std::max(0.0, gap) / eps, report.gap_over_eps);

    const Index k = rec.k - 1;
    if (k >= sched.k1() && k >= 1 && sched.q_at(k) > s) {
      const double e = energy(sched, obj, k, rec.x, eta(sched, rec.k, rec.x, rec.y), oracle.x_star);
      const double q = sched.q_at(k);
      windows.add(k, e / (q * q * sched.eps_at(k)), report.energy_over_q2eps);
    }
  }

  report.dist_xstar_final = (recs.back().x - oracle.x_star).norm();

  {
    std::ostringstream detail;
    detail << std::setprecision(6) << "|x_N - x*| = " << report.dist_xstar_final
           << " (threshold " << opts.min_norm_threshold << ")";
    report.verdicts.push_back(
        {"min_norm", report.dist_xstar_final <= opts.min_norm_threshold, detail.str()});
  }
  report.verdicts.push_back(little_o_claim("gap_o_eps", report.gap_over_eps));
  {
    ClaimVerdict vx = big_o_claim("value_O_eps", report.f_over_eps, report.sup_f_over_eps);
    ClaimVerdict vy = big_o_claim("value_O_eps", report.fy_over_eps, 0.0);
    vx.pass = vx.pass && vy.pass;
    vx.detail = "x: " + vx.detail + "; y: " + vy.detail;
    report.verdicts.push_back(std::move(vx));
  }
  report.verdicts.push_back(little_o_claim("velocity_o_sqrt_eps", report.vel_ratio));
  {
    ClaimVerdict gx = little_o_claim("gradient_o_sqrt_eps", report.gradx_ratio);
    ClaimVerdict gy = little_o_claim("gradient_o_sqrt_eps", report.grady_ratio);
    gx.pass = gx.pass && gy.pass;
    gx.detail = "x: " + gx.detail + "; y: " + gy.detail;
    report.verdicts.push_back(std::move(gx));
  }
  report.verdicts.push_back(little_o_claim("energy_o_q2eps", report.energy_over_q2eps));
  return report;
}

std::string format_rate_report(const RateReport& report) {
  std::ostringstream out;
  out << "rate report: tail [" << report.k_tail << ", " << report.horizon << "]\n";
  out << std::setprecision(6) << "  sup (f(x_k) - min f)/eps_k = " << report.sup_f_over_eps << "\n";
  for (const auto& v : report.verdicts) {
    out << "  " << (v.pass ? "PASS " : "FAIL ") << std::left << std::setw(22) << v.name << v.detail
        << "\n";
  }
  for (const auto& n : report.notes) out << "  note: " << n << "\n";
  return out.str();
}

}  // namespace tiknest
