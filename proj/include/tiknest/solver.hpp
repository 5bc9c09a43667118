#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tiknest/problems.hpp"
#include "tiknest/schedules.hpp"
#include "tiknest/types.hpp"

namespace tiknest {

struct SolverConfig {
  Objective objective;
  Schedule schedule;
  Vector x0;
  Vector x1;
  Index max_iter = 20;
  Variant variant = Variant::full;
  Index record_every = 0;  ///< 0 selects default_record_stride(max_iter)

  double s() const { return schedule.s(); }
};

/// 1 below 1e3 iterations, else ceil(max_iter / 1e4).
Index default_record_stride(Index max_iter);

/// Iterate k: x = x_k, y = y_k and the coefficients used to form y_k and x_{k+1}.
struct IterateRecord {
  Index k = 0;
  Vector x;
  Vector y;
  double f_x = 0.0;
  double f_y = 0.0;
  double grad_norm_x = 0.0;
  double grad_norm_y = 0.0;
  double velocity = 0.0;    ///< |x_k - x_{k-1}|
  double dist_xstar = 0.0;  ///< |x_k - x*|, NaN without an oracle
  double eps_k = 0.0;
  double b_k = 0.0;  ///< b_{k-1}
  double c_k = 0.0;
};

struct Trace {
  std::string summary;
  Variant variant = Variant::full;
  std::vector<IterateRecord> records;
  Vector final_x;  ///< x_{n+1} after the last completed iteration n
  Index iterations = 0;
  double wall_time = 0.0;
  std::vector<std::string> warnings;
};

/// Thrown by run when an iterate stops being finite. Carries the trace up to k - 1.
class DivergenceError : public Error {
 public:
  DivergenceError(Index k, Trace partial);
  Index k() const { return k_; }
  const Trace& partial() const { return partial_; }

 private:
  Index k_;
  Trace partial_;
};

struct StepCoefficients {
  double eps = 0.0;
  double b = 0.0;  ///< b_{k-1}
  double c = 0.0;  ///< c_k
};

/// Coefficients at outer iteration k for a variant.
///
/// drop_eps and drop_both evaluate (B) with eps identically zero. drop_eps keeps
/// c_k = 2 s^2 / (q_{k-1} q_k), the (C) formula at eps = 0. drop_c and drop_both
/// force c_k = 0.
StepCoefficients step_coefficients(const Schedule& sched, Variant variant, Index k);

struct StepResult {
  Vector y;
  Vector x_next;
};

/// y = x_k + b (x_k - x_{k-1}) - c x_k;  x_{k+1} = (1 - s eps) y - s grad f(y).
StepResult step_with(const Objective& obj, double s, const StepCoefficients& coef,
                     const Vector& x_prev, const Vector& x_curr);
/// Same extrapolation, then x_{k+1} = y - s grad f_eps(y).
StepResult step_equivalent_with(const Objective& obj, double s, const StepCoefficients& coef,
                                const Vector& x_prev, const Vector& x_curr);

/// Throw DivergenceError (with an empty partial trace) on non-finite output.
StepResult step(const Vector& x_prev, const Vector& x_curr, Index k, const SolverConfig& cfg);
StepResult step_equivalent(const Vector& x_prev, const Vector& x_curr, Index k,
                           const SolverConfig& cfg);

/// Runs k = 1..max_iter from (x0, x1). First and last iterates are always recorded.
Trace run(const SolverConfig& cfg);

struct MatrixRun {
  std::string label;
  std::optional<double> p_exp;  ///< empty for the baseline
  Variant variant = Variant::full;
  Trace trace;
  std::optional<std::string> error;
};

/// One run per p (base variant, eps_k = c / k^p) plus a drop_both baseline on the base
/// schedule. A run that fails keeps its partial trace and error message; the others
/// still execute. Runs execute concurrently.
std::vector<MatrixRun> run_matrix(const SolverConfig& base, std::span<const double> p_values);

}  // namespace tiknest
