#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tiknest/types.hpp"

namespace tiknest {

/// q_k = a k^q_exp, eps_k = c / k^p_exp.
struct PolyScheduleParams {
  double a = 1.0;
  double q_exp = 0.8;
  double c = 1.0;
  double p_exp = 1.5;
};

enum class Certification {
  rate_certified,  ///< 0 < q < 1 and 0 < p < 2q
  q1_mode,         ///< q = 1 and a < s/2
  uncertified,
};

Certification certify(const PolyScheduleParams& params, double s);
std::string describe_certification(const PolyScheduleParams& params, double s);

/// The parameter system (s, eps_k, q_k) together with its validity indices.
///
/// k0 is the first index of condition (S), s <= 1/(L + eps_k0), for the Lipschitz bound
/// supplied at construction. When s L >= 1 no such index exists; the schedule is still
/// usable, condition_s_holds() is false and k0 falls back to 1. k1 is the first k >= k0
/// with 1 - s eps_k > 0. Both are computed once; k2 depends on a horizon and is found on
/// demand with find_k2.
class Schedule {
 public:
  using Rule = std::function<double(Index)>;

  static Schedule polynomial(const PolyScheduleParams& params, double s, double lipschitz);
  static Schedule generic(Rule eps, Rule q, double s, double lipschitz);

  double s() const { return s_; }
  double lipschitz() const { return lipschitz_; }

  /// Throws IndexError for k < 1.
  double eps_at(Index k) const;
  double q_at(Index k) const;
  /// eps_{k-1} - eps_k for k >= 2, without cancellation for polynomial schedules.
  double eps_drop(Index k) const;

  Index k0() const { return k0_; }
  Index k1() const { return k1_; }
  bool condition_s_holds() const { return condition_s_; }

  const std::optional<PolyScheduleParams>& polynomial_params() const { return poly_; }

 private:
  Schedule(double s, double lipschitz, Rule eps, Rule q, std::optional<PolyScheduleParams> poly);
  void compute_indices();

  double s_;
  double lipschitz_;
  Rule eps_;
  Rule q_;
  std::optional<PolyScheduleParams> poly_;
  Index k0_ = 1;
  Index k1_ = 1;
  bool condition_s_ = false;
};

/// int((c s / (1 - L s))^(1/p)) + 1, saturating at 2^52. Throws
/// ConditionSUnsatisfiableError when s L >= 1.
Index k0_poly(const PolyScheduleParams& params, double s, double lipschitz);

/// Smallest k >= k0 with 1 - s eps_k > 0.
Index k1_index(const Schedule& sched);

struct QVerdict {
  bool inequality = false;   ///< first part of (Q)
  bool lower_bound = false;  ///< q_k >= 2s / (1 - s eps_k)^2
  double inequality_value = 0.0;
  double lower_bound_margin = 0.0;

  bool holds() const { return inequality && lower_bound; }
};

/// Evaluates both parts of (Q) at k. Throws PreconditionError for k < k1.
QVerdict check_Q(const Schedule& sched, Index k);

/// Smallest k such that (Q) holds at every sampled index of [k, horizon].
///
/// Indices up to 1e5 are scanned densely, beyond that geometrically; the gap after the
/// last failing geometric sample is rescanned densely. Throws PreconditionError if
/// horizon < k1.
std::optional<Index> find_k2(const Schedule& sched, Index horizon);

/// k2 + 1 when k2 exists within the horizon.
std::optional<Index> kbar_index(const Schedule& sched, Index horizon);

/// Raw (B) and (C) formulas in terms of eps_{k-1}, eps_k, q_{k-1}, q_k. Return 0 when the
/// denominator factor (1 - s eps_{k-1})(1 - s eps_k) q_{k-1} q_k is below 1e-14 in magnitude.
double inertial_coefficient(double s, double eps_prev, double eps_k, double q_prev, double q_k);
double tikhonov_coefficient(double s, double eps_prev, double eps_k, double q_prev, double q_k);
/// Same, with eps_prev - eps_k supplied separately.
double tikhonov_coefficient(double s, double eps_prev, double eps_k, double eps_drop,
                            double q_prev, double q_k);

/// b_{k-1}: the weight on (x_k - x_{k-1}) at outer iteration k. Zero at k = 1.
double b_coef(const Schedule& sched, Index k);
/// c_k: the weight on x_k at outer iteration k. Zero at k = 1.
double c_coef(const Schedule& sched, Index k);

/// Polynomial closed forms of b_{k-1} and c_k in terms of k alone.
///
/// cp_closed_form uses -s c (k-1)^p as the second numerator term; substituting the
/// polynomial schedule into the generic c_k formula yields that factor s.
double bp_closed_form(const PolyScheduleParams& params, double s, Index k);
double cp_closed_form(const PolyScheduleParams& params, double s, Index k);

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;  ///< sup, growth factor or tail ratio, depending on the check
  std::string detail;
};

struct HypothesisReport {
  Index start = 1;
  Index horizon = 1;
  std::vector<HypothesisCheck> checks;  ///< ratio_bounded, q2eps_increasing, q2eps_divergent, drift_vanishing
  std::vector<std::string> notes;

  bool all_pass() const;
  const HypothesisCheck& get(const std::string& name) const;
};

/// Numerical check of the four sequence hypotheses of the strong-convergence theorem
/// over [start, horizon]. When start is omitted it is kbar if k2 is found within the
/// horizon and k1 otherwise (recorded in notes).
HypothesisReport check_theorem2_hypotheses(const Schedule& sched, Index horizon,
                                           std::optional<Index> start = std::nullopt);

/// Sample indices in [lo, hi]: every index up to dense_limit, then a geometric grid with
/// the given ratio. Always contains lo and hi.
std::vector<Index> sample_indices(Index lo, Index hi, Index dense_limit = 100'000,
                                  double ratio = 1.001);

/// n log-spaced distinct indices in [lo, hi].
std::vector<Index> log_grid(Index lo, Index hi, Index n);

}  // namespace tiknest
