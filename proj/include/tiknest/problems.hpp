#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "tiknest/types.hpp"

namespace tiknest {

/// Exact knowledge about argmin f used by benchmarks.
struct MinNormOracle {
  Vector x_star;      ///< minimal-norm minimizer
  double min_value;   ///< min f
  Matrix null_basis;  ///< columns span argmin f - x_star (may have zero columns)

  /// Another minimizer: x_star + null_basis * coords.
  Vector minimizer(const Vector& coords) const;
};

/// f(x) = 0.5 x^T H x - g^T x + constant, with H symmetric PSD.
struct QuadraticForm {
  Matrix hessian;
  Vector linear;
  double constant = 0.0;
};

/// Smooth convex objective with L-Lipschitz gradient.
///
/// Immutable after construction; copies share the underlying callables.
class Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  Objective(std::string name, Index dimension, ValueFn value, GradientFn gradient,
            double lipschitz, std::optional<MinNormOracle> oracle = std::nullopt);

  /// Objective whose Tikhonov points are found by a linear solve.
  static Objective quadratic(std::string name, QuadraticForm form, double lipschitz,
                             std::optional<MinNormOracle> oracle,
                             ValueFn value = {}, GradientFn gradient = {});

  const std::string& name() const { return name_; }
  Index dimension() const { return dimension_; }
  double lipschitz() const { return lipschitz_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  /// Looser constant quoted alongside some benchmarks, for reporting only.
  const std::optional<double>& lipschitz_paper() const { return lipschitz_paper_; }
  Objective& with_reported_lipschitz(double value);

  const std::optional<MinNormOracle>& oracle() const { return oracle_; }
  const MinNormOracle& require_oracle() const;
  const std::optional<QuadraticForm>& quadratic_form() const { return form_; }

 private:
  std::string name_;
  Index dimension_;
  ValueFn value_;
  GradientFn gradient_;
  double lipschitz_;
  std::optional<double> lipschitz_paper_;
  std::optional<MinNormOracle> oracle_;
  std::optional<QuadraticForm> form_;
};

/// f(x, y) = (a x + b y)^2 on R^2. Throws InvalidProblemError if a or b is zero.
Objective paper_quadratic(double a, double b);

/// f(x) = 0.5 |x - u|^2.
Objective shifted_quadratic(const Vector& u);

/// f(x) = 0.5 x^T A x - b^T x for symmetric PSD A.
///
/// The min-norm minimizer is the pseudoinverse solution of A x = b computed from an
/// eigendecomposition with cutoff 1e-10 * lambda_max. Throws UnboundedBelowError when
/// b is not in range(A) and InvalidProblemError when A is not symmetric PSD or is zero.
Objective psd_quadratic(const Matrix& A, const Vector& b);

/// Regularized objective f_eps(x) = f(x) + eps/2 |x|^2 and its gradient.
double regularized_value(const Objective& obj, double eps, const Vector& x);
Vector regularized_gradient(const Objective& obj, double eps, const Vector& x);

struct TikhonovPoint {
  double eps;
  Vector point;
};

struct TikhonovSolverOptions {
  double gradient_tolerance = 1e-12;
  Index max_iterations = 1'000'000;
};

/// Unique minimizer of f + eps/2 |.|^2.
///
/// Quadratic objectives use a Cholesky solve of (H + eps I) x = g. Everything else runs
/// fixed-step gradient descent with step 1/(L + eps) from the origin and throws
/// OracleFailureError when the gradient-norm tolerance is not met within the budget.
TikhonovPoint tikhonov_point(const Objective& obj, double eps,
                             const TikhonovSolverOptions& options = {});

}  // namespace tiknest
