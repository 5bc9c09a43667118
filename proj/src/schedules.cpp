#include "tiknest/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace tiknest {

namespace {

constexpr double kDenominatorGuard = 1e-14;
constexpr Index kSearchCap = Index{1} << 52;

// Smallest k >= lo with pred(k), assuming pred is monotone (false ... false true ...).
template <class Pred>
std::optional<Index> first_true(Index lo, Pred pred) {
  if (pred(lo)) return lo;
  Index bad = lo;
  Index step = 1;
  Index good = -1;
  while (bad + step <= kSearchCap) {
    const Index probe = bad + step;
    if (pred(probe)) {
      good = probe;
      break;
    }
    bad = probe;
    step *= 2;
  }
  if (good < 0) return std::nullopt;
  while (good - bad > 1) {
    const Index mid = bad + (good - bad) / 2;
    if (pred(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return good;
}

void require_index(Index k, const char* what) {
  if (k < 1) throw IndexError(std::string(what) + ": index must be >= 1, got " + std::to_string(k));
}

// Max of values over samples with k in [lo, hi].
double window_max(const std::vector<Index>& ks, const std::vector<double>& vals, Index lo,
                  Index hi) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] >= lo && ks[i] <= hi) m = std::max(m, vals[i]);
  }
  return m;
}

}  // namespace

Certification certify(const PolyScheduleParams& params, double s) {
  const double q = params.q_exp;
  const double p = params.p_exp;
  if (q > 0.0 && q < 1.0 && p > 0.0 && p < 2.0 * q) return Certification::rate_certified;
  if (q == 1.0 && params.a < s / 2.0) return Certification::q1_mode;
  return Certification::uncertified;
}

std::string describe_certification(const PolyScheduleParams& params, double s) {
  std::ostringstream out;
  switch (certify(params, s)) {
    case Certification::rate_certified:
      out << "rate_certified: yes (0<p<2q)";
      break;
    case Certification::q1_mode:
      out << "q1_mode: a < s/2 holds";
      break;
    case Certification::uncertified:
      out << "rate_certified: no (";
      if (params.q_exp == 1.0) {
        out << "q=1 requires a < s/2; a=" << params.a << ", s/2=" << s / 2.0;
      } else if (!(params.q_exp > 0.0 && params.q_exp < 1.0)) {
        out << "requires 0<q<1; q=" << params.q_exp;
      } else {
        out << "requires 0<p<2q; p=" << params.p_exp << ", 2q=" << 2.0 * params.q_exp;
      }
      out << ")";
      break;
  }
  return out.str();
}

Schedule::Schedule(double s, double lipschitz, Rule eps, Rule q,
                   std::optional<PolyScheduleParams> poly)
    : s_(s), lipschitz_(lipschitz), eps_(std::move(eps)), q_(std::move(q)), poly_(poly) {
  if (!(s_ > 0.0) || !std::isfinite(s_)) throw PreconditionError("schedule: s must be positive");
  if (!(lipschitz_ > 0.0)) throw PreconditionError("schedule: Lipschitz bound must be positive");
  compute_indices();
}

Schedule Schedule::polynomial(const PolyScheduleParams& params, double s, double lipschitz) {
  if (!(params.a > 0.0) || !(params.c > 0.0) || !(params.p_exp > 0.0) || !(params.q_exp > 0.0)) {
    throw PreconditionError("polynomial schedule: a, c, p and q must be positive");
  }
  auto eps = [c = params.c, p = params.p_exp](Index k) { return c * std::pow(double(k), -p); };
  auto q = [a = params.a, e = params.q_exp](Index k) { return a * std::pow(double(k), e); };
  return Schedule(s, lipschitz, eps, q, params);
}

Schedule Schedule::generic(Rule eps, Rule q, double s, double lipschitz) {
  if (!eps || !q) throw PreconditionError("generic schedule: missing rule");
  return Schedule(s, lipschitz, std::move(eps), std::move(q), std::nullopt);
}

double Schedule::eps_at(Index k) const {
  require_index(k, "eps_at");
  return eps_(k);
}

double Schedule::q_at(Index k) const {
  require_index(k, "q_at");
  return q_(k);
}

double Schedule::eps_drop(Index k) const {
  if (k < 2) throw IndexError("eps_drop: index must be >= 2, got " + std::to_string(k));
  if (!poly_) return eps_(k - 1) - eps_(k);
  // c/(k-1)^p - c/k^p = c ((k/(k-1))^p - 1) / k^p
  const double ratio_m1 = std::expm1(poly_->p_exp * std::log1p(1.0 / double(k - 1)));
  return poly_->c * ratio_m1 / std::pow(double(k), poly_->p_exp);
}

void Schedule::compute_indices() {
  condition_s_ = s_ * lipschitz_ < 1.0;
  k0_ = 1;
  if (condition_s_) {
    if (poly_) {
      k0_ = k0_poly(*poly_, s_, lipschitz_);
    } else {
      auto found = first_true(1, [&](Index k) { return s_ * (lipschitz_ + eps_(k)) <= 1.0; });
      if (!found) {
        condition_s_ = false;
      } else {
        k0_ = *found;
      }
    }
  }
  k1_ = k1_index(*this);
}

Index k0_poly(const PolyScheduleParams& params, double s, double lipschitz) {
  if (s * lipschitz >= 1.0) {
    throw ConditionSUnsatisfiableError("condition (S) unsatisfiable: s*L = " +
                                       std::to_string(s * lipschitz) + " >= 1");
  }
  const double base = params.c * s / (1.0 - lipschitz * s);
  const double root = std::pow(base, 1.0 / params.p_exp);
  if (!(root < double(kSearchCap))) return kSearchCap;
  return static_cast<Index>(root) + 1;
}

Index k1_index(const Schedule& sched) {
  const double s = sched.s();
  if (const auto& poly = sched.polynomial_params()) {
    const double root = std::pow(s * poly->c, 1.0 / poly->p_exp);
    const Index from_eps = static_cast<Index>(std::min(root, double(kSearchCap))) + 1;
    return std::max(sched.k0(), from_eps);
  }
  auto found = first_true(sched.k0(), [&](Index k) { return 1.0 - s * sched.eps_at(k) > 0.0; });
  if (!found) throw PreconditionError("k1: 1 - s*eps_k stays nonpositive (eps does not vanish)");
  return *found;
}

QVerdict check_Q(const Schedule& sched, Index k) {
  if (k < sched.k1()) {
    throw PreconditionError("check_Q: k = " + std::to_string(k) + " < k1 = " +
                            std::to_string(sched.k1()));
  }
  const double s = sched.s();
  const double w0 = 1.0 - s * sched.eps_at(k);
  const double w1 = 1.0 - s * sched.eps_at(k + 1);
  const double q0 = sched.q_at(k);
  const double q1 = sched.q_at(k + 1);

  QVerdict v;
  v.inequality_value = w1 * w1 * q1 * q1 - w0 * w0 * q0 * q0 - 2.0 * s * q1 + s * w0 * w0 * q0;
  v.lower_bound_margin = q0 - 2.0 * s / (w0 * w0);
  v.inequality = v.inequality_value <= 0.0;
  v.lower_bound = v.lower_bound_margin >= 0.0;
  return v;
}

std::vector<Index> sample_indices(Index lo, Index hi, Index dense_limit, double ratio) {
  std::vector<Index> out;
  if (hi < lo) return out;
  Index k = lo;
  for (; k <= hi && k <= dense_limit; ++k) out.push_back(k);
  while (k <= hi) {
    out.push_back(k);
    k = std::max(k + 1, static_cast<Index>(std::ceil(double(k) * ratio)));
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

std::vector<Index> log_grid(Index lo, Index hi, Index n) {
  std::vector<Index> out;
  if (hi < lo || n <= 0) return out;
  if (n == 1 || hi == lo) return {lo};
  const double llo = std::log(double(lo));
  const double lhi = std::log(double(hi));
  for (Index i = 0; i < n; ++i) {
    const double t = llo + (lhi - llo) * double(i) / double(n - 1);
    Index k = std::clamp(static_cast<Index>(std::llround(std::exp(t))), lo, hi);
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

std::optional<Index> find_k2(const Schedule& sched, Index horizon) {
  const Index k1 = sched.k1();
  if (horizon < k1) {
    throw PreconditionError("find_k2: horizon " + std::to_string(horizon) + " < k1 = " +
                            std::to_string(k1));
  }
  const std::vector<Index> ks = sample_indices(k1, horizon);
  std::optional<std::size_t> last_fail;
  for (std::size_t i = ks.size(); i-- > 0;) {
    if (!check_Q(sched, ks[i]).holds()) {
      last_fail = i;
      break;
    }
  }
  if (!last_fail) return k1;
  if (*last_fail + 1 == ks.size()) return std::nullopt;

  const Index fail_at = ks[*last_fail];
  const Index next_ok = ks[*last_fail + 1];
  for (Index k = next_ok - 1; k > fail_at; --k) {
    if (!check_Q(sched, k).holds()) return k + 1;
  }
  return fail_at + 1;
}

std::optional<Index> kbar_index(const Schedule& sched, Index horizon) {
  auto k2 = find_k2(sched, horizon);
  if (!k2) return std::nullopt;
  return *k2 + 1;
}

double inertial_coefficient(double s, double eps_prev, double eps_k, double q_prev, double q_k) {
  const double w_prev = 1.0 - s * eps_prev;
  const double w_k = 1.0 - s * eps_k;
  const double denom = w_prev * w_k * q_prev * q_k;
  if (std::abs(denom) < kDenominatorGuard) return 0.0;
  return (q_prev - s) * (w_prev * w_prev * q_prev - 2.0 * s) / denom;
}

double tikhonov_coefficient(double s, double eps_prev, double eps_k, double q_prev, double q_k) {
  return tikhonov_coefficient(s, eps_prev, eps_k, eps_prev - eps_k, q_prev, q_k);
}

double tikhonov_coefficient(double s, double eps_prev, double eps_k, double eps_drop,
                            double q_prev, double q_k) {
  const double w_prev = 1.0 - s * eps_prev;
  const double w_k = 1.0 - s * eps_k;
  if (std::abs(w_prev * w_k * q_prev * q_k) < kDenominatorGuard) return 0.0;
  const double bracket = s / q_prev - s * s * eps_k / q_prev - s * eps_drop;
  return 2.0 * s / (w_prev * w_k * w_k * q_k) * bracket;
}

double b_coef(const Schedule& sched, Index k) {
  require_index(k, "b_coef");
  if (k == 1) return 0.0;
  return inertial_coefficient(sched.s(), sched.eps_at(k - 1), sched.eps_at(k), sched.q_at(k - 1),
                              sched.q_at(k));
}

double c_coef(const Schedule& sched, Index k) {
  require_index(k, "c_coef");
  if (k == 1) return 0.0;
  return tikhonov_coefficient(sched.s(), sched.eps_at(k - 1), sched.eps_at(k), sched.eps_drop(k),
                              sched.q_at(k - 1), sched.q_at(k));
}

namespace {

struct PolyPowers {
  double Kp, Kq, Mp, Mq;
  double Kp_minus_Mp;
  double cs;
  bool degenerate;
};

PolyPowers poly_powers(const PolyScheduleParams& pp, double s, Index k) {
  const double K = double(k);
  const double M = double(k - 1);
  const double Mp = std::pow(M, pp.p_exp);
  PolyPowers w{std::pow(K, pp.p_exp), std::pow(K, pp.q_exp), Mp, std::pow(M, pp.q_exp),
               Mp * std::expm1(pp.p_exp * std::log1p(1.0 / M)), pp.c * s, false};
  const double factor =
      (1.0 - w.cs / w.Mp) * (1.0 - w.cs / w.Kp) * pp.a * pp.a * w.Mq * w.Kq;
  w.degenerate = !(std::abs(factor) >= kDenominatorGuard);
  return w;
}

}  // namespace

double bp_closed_form(const PolyScheduleParams& pp, double s, Index k) {
  require_index(k, "bp_closed_form");
  if (k == 1) return 0.0;
  const PolyPowers w = poly_powers(pp, s, k);
  if (w.degenerate) return 0.0;
  const double a = pp.a;
  const double num = w.Kp * (a * w.Mq - s) *
                     (a * (w.Mp - w.cs) * (w.Mp - w.cs) * w.Mq - 2.0 * s * w.Mp * w.Mp);
  const double den = a * a * w.Mq * w.Mp * w.Kq * (w.Mp - w.cs) * (w.Kp - w.cs);
  return num / den;
}

double cp_closed_form(const PolyScheduleParams& pp, double s, Index k) {
  require_index(k, "cp_closed_form");
  if (k == 1) return 0.0;
  const PolyPowers w = poly_powers(pp, s, k);
  if (w.degenerate) return 0.0;
  const double a = pp.a;
  const double c = pp.c;
  const double inner = w.Mp * w.Kp - s * c * w.Mp - a * c * w.Mq * w.Kp_minus_Mp;
  const double num = 2.0 * s * s * w.Kp * inner;
  const double den = a * a * w.Mq * w.Kq * (w.Mp - w.cs) * (w.Kp - w.cs) * (w.Kp - w.cs);
  return num / den;
}

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const HypothesisCheck& HypothesisReport::get(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw PreconditionError("no hypothesis check named " + name);
}

HypothesisReport check_theorem2_hypotheses(const Schedule& sched, Index horizon,
                                           std::optional<Index> start) {
  HypothesisReport report;
  report.horizon = horizon;
  if (start) {
    report.start = *start;
  } else if (horizon >= sched.k1()) {
    if (auto kbar = kbar_index(sched, horizon); kbar && *kbar <= horizon) {
      report.start = *kbar;
    } else {
      report.start = sched.k1();
      report.notes.push_back("(Q) not satisfied within horizon; hypotheses evaluated from k1 = " +
                             std::to_string(sched.k1()));
    }
  } else {
    report.start = sched.k1();
  }
  if (horizon < report.start) {
    throw PreconditionError("check_theorem2_hypotheses: horizon " + std::to_string(horizon) +
                            " < start " + std::to_string(report.start));
  }

  const Index lo = std::max<Index>(report.start, 2);
  const std::vector<Index> ks = sample_indices(lo, std::max(lo, horizon));
  auto q2eps = [&](Index k) {
    const double q = sched.q_at(k);
    return q * q * sched.eps_at(k);
  };

  // 1. q_k eps_k / (q_{k-1} eps_{k-1}) bounded.
  {
    double sup = 0.0;
    for (Index k : ks) {
      const double r = sched.q_at(k) * sched.eps_at(k) / (sched.q_at(k - 1) * sched.eps_at(k - 1));
      sup = std::max(sup, std::isfinite(r) ? r : std::numeric_limits<double>::infinity());
    }
    report.checks.push_back({"ratio_bounded", std::isfinite(sup), sup,
                             "sup q_k eps_k/(q_{k-1} eps_{k-1}) = " + std::to_string(sup)});
  }

  // 2. q_k^2 eps_k increasing from start - 1 on.
  {
    Index violations = 0;
    Index first_bad = 0;
    for (Index k : ks) {
      if (!(q2eps(k) > q2eps(k - 1))) {
        if (violations++ == 0) first_bad = k;
      }
    }
    std::string detail = violations == 0 ? "strictly increasing on sampled indices"
                                         : std::to_string(violations) +
                                               " sampled decreases, first at k = " +
                                               std::to_string(first_bad);
    report.checks.push_back({"q2eps_increasing", violations == 0, double(violations), detail});
  }

  // 3. q_k^2 eps_k -> infinity: growth between the geometric midpoint and the horizon.
  {
    const Index mid = std::max<Index>(
        lo, static_cast<Index>(std::llround(std::sqrt(double(lo) * double(horizon)))));
    const double growth = q2eps(horizon) / q2eps(mid);
    report.checks.push_back({"q2eps_divergent", growth > 1.0, growth,
                             "q^2 eps at horizon / at k=" + std::to_string(mid) + " = " +
                                 std::to_string(growth)});
  }

  // 4. q_k (eps_k - eps_{k+1}) / eps_k -> 0, as a first-decade vs last-decade trend.
  {
    std::vector<double> drift;
    drift.reserve(ks.size());
    for (Index k : ks) {
      const double e = sched.eps_at(k);
      drift.push_back(sched.q_at(k) * sched.eps_drop(k + 1) / e);
    }
    const double first = window_max(ks, drift, lo, 10 * lo);
    const double last = window_max(ks, drift, std::max(lo, horizon / 10), horizon);
    const double ratio = first > 0.0 ? last / first : (last > 0.0 ? INFINITY : 0.0);
    report.checks.push_back({"drift_vanishing", last <= 0.5 * first, ratio,
                             "tail max " + std::to_string(last) + ", first-decade max " +
                                 std::to_string(first)});
    if (horizon < 100 * lo) {
      report.notes.push_back("horizon spans fewer than two decades; decade windows overlap");
    }
  }
  return report;
}

}  // namespace tiknest
