#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tiknest/problems.hpp"
#include "tiknest/schedules.hpp"
#include "tiknest/solver.hpp"

namespace tiknest {

// ---------------------------------------------------------------------------
// Lyapunov quantities

/// p_k = (1 - s eps_k)^2 q_k^2 / (2s) - q_k. Throws PreconditionError for k < k1.
double p_coef(const Schedule& sched, Index k);

/// eta_k = ((p_k + q_k) y_k - p_k x_k) / ((1 - s/q_{k-1})(1 - s eps_k) q_k).
///
/// Evaluated in the equivalent form A (y_k - x_k) + B x_k, which avoids cancelling the
/// two large (p_k + q_k) y_k and p_k x_k terms. Throws DegenerateWeightError when
/// q_{k-1} <= s.
Vector eta(const Schedule& sched, Index k, const Vector& x_k, const Vector& y_k);

/// E_k = (p_k + q_k)(f_{k+1}(x_{k+1}) - f_{k+1}(xbar_{k+1})) + |eta_{k+1} - x*|^2.
double energy(const Schedule& sched, const Objective& obj, Index k, const Vector& x_next,
              const Vector& eta_next, const Vector& x_star);

// ---------------------------------------------------------------------------
// Sampled inequality checkers. Violation = lhs - rhs of "lhs <= rhs"; a check passes
// when the largest violation is at most its tolerance.

struct InequalityCheck {
  std::string name;
  Index samples = 0;
  double max_violation = -std::numeric_limits<double>::infinity();
  double tolerance = 1e-9;

  void record(double violation);
  bool pass() const { return samples == 0 || max_violation <= tolerance; }
};

struct SamplingOptions {
  Index samples = 10'000;
  double box = 10.0;  ///< points drawn uniformly from [-box, box]^n
  std::uint64_t seed = 0x5eed'2024;
};

/// f(x) <= f(y) + <grad f(y), x - y> + L/2 |y - x|^2.
InequalityCheck check_descent_lemma(const Objective& obj, const SamplingOptions& opts = {});

/// 1/(2L) |grad f(y) - grad f(x)|^2 + <grad f(y), x - y> + f(y) <= f(x).
InequalityCheck check_gradient_inequality(const Objective& obj, const SamplingOptions& opts = {});

struct ModifiedDescentReport {
  InequalityCheck f3;  ///< (L/2 s^2 - s) form, valid for every s > 0
  InequalityCheck f4;  ///< -s/2 form, valid for s <= 1/L
  /// min (rhs4 - rhs3), relative to the size of the summed terms; >= 0 means (f3) implies (f4)
  double worst_chain_gap = std::numeric_limits<double>::infinity();

  bool chain_consistent() const { return worst_chain_gap >= -1e-12; }
  bool pass() const { return f3.pass() && f4.pass() && chain_consistent(); }
};

/// Throws PreconditionError when s <= 0 or s > 1/L.
ModifiedDescentReport check_modified_descent(const Objective& obj, double s,
                                             const SamplingOptions& opts = {});

struct PathBoundReport {
  InequalityCheck path_step{"path_step", 0, -std::numeric_limits<double>::infinity(), 1e-10};
  InequalityCheck strong_convexity_gap{"strong_convexity_gap", 0,
                                       -std::numeric_limits<double>::infinity(), 1e-10};
  InequalityCheck value_transfer{"value_transfer", 0, -std::numeric_limits<double>::infinity(),
                                 1e-10};
  InequalityCheck norm_bound{"norm_bound", 0, -std::numeric_limits<double>::infinity(), 1e-10};
  InequalityCheck norm_monotone{"norm_monotone", 0, -std::numeric_limits<double>::infinity(),
                                1e-10};
  double first_distance = 0.0;  ///< |xbar(eps_first) - x*|
  double last_distance = 0.0;   ///< |xbar(eps_last) - x*|

  bool converging() const { return last_distance <= first_distance + 1e-12; }
  bool pass() const;
};

/// Regularization-path facts along a strictly decreasing eps list: the path-step bound,
/// the strong-convexity gap, the value-transfer inequality (opts.samples points per eps),
/// |xbar| <= |x*|, monotone |xbar| and approach to x*.
PathBoundReport check_path_bounds(const Objective& obj, std::span<const double> eps_list,
                                  const SamplingOptions& opts = {20, 10.0, 0x5eed'2024});

struct EnergySample {
  Index k = 0;
  double energy = 0.0;
  double ratio = 0.0;  ///< E_k / (q_k^2 eps_k)
  bool q_holds = false;
};

struct LyapunovReport {
  Index pairs_checked = 0;
  double max_eta_residual = 0.0;  ///< relative to the magnitude of the recurrence terms
  Index worst_eta_k = 0;
  Index p_checked = 0;  ///< indices where (Q) holds
  double min_p_where_q = std::numeric_limits<double>::infinity();
  InequalityCheck descent_along_trace{"descent_along_trace", 0,
                                      -std::numeric_limits<double>::infinity(), 1e-9};
  InequalityCheck gap_to_distance{"gap_to_distance", 0,
                                  -std::numeric_limits<double>::infinity(), 1e-10};
  std::vector<EnergySample> energy_samples;
  double min_energy_where_q = std::numeric_limits<double>::infinity();
};

/// Recurrence, sign and descent checks along a full-variant trace. Needs consecutive
/// records (record_every = 1) for the pairwise checks; energies use up to
/// max_energy_samples log-spaced records.
LyapunovReport lyapunov_analysis(const Trace& trace, const Schedule& sched, const Objective& obj,
                                 Index max_energy_samples = 200);

// ---------------------------------------------------------------------------
// Rate report

struct DecadeTrend {
  double first = 0.0;  ///< max over k in [k_tail, 10 k_tail]
  double last = 0.0;   ///< max over k in [N/10, N]
};

struct ClaimVerdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RateOptions {
  double min_norm_threshold = 0.05;
  Index max_oracle_samples = 200;
  /// Start of the tail. Defaults to max(kbar, N/100), with kbar from find_k2 over the run.
  std::optional<Index> k_tail;
};

struct RateReport {
  Index k_tail = 0;
  Index horizon = 0;
  double sup_f_over_eps = 0.0;
  DecadeTrend f_over_eps;
  DecadeTrend fy_over_eps;
  DecadeTrend vel_ratio;    ///< |x_k - x_{k-1}| / sqrt(eps_k)
  DecadeTrend gradx_ratio;  ///< |grad f(x_k)| / sqrt(eps_k)
  DecadeTrend grady_ratio;  ///< |grad f(y_k)| / sqrt(eps_k)
  DecadeTrend gap_over_eps;
  DecadeTrend energy_over_q2eps;
  double dist_xstar_final = 0.0;
  std::vector<ClaimVerdict> verdicts;
  std::vector<std::string> notes;

  bool all_pass() const;
  const ClaimVerdict& get(const std::string& name) const;
};

/// Decade-trend verdicts for the rate conclusions: O(.) claims need a finite tail sup whose
/// last-decade max does not exceed the first-decade max; o(.) claims need the last-decade
/// max to be at most half the first-decade max. Ratios are normalized by the schedule's
/// eps_k, so ablation traces are judged against the same targets. Throws
/// InsufficientDataError for traces with fewer than 100 records.
RateReport rate_report(const Trace& trace, const Schedule& sched, const Objective& obj,
                       const RateOptions& opts = {});

std::string format_rate_report(const RateReport& report);

}  // namespace tiknest
