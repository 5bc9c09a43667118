#include "tiknest/problems.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace tiknest {

Vector MinNormOracle::minimizer(const Vector& coords) const {
  if (coords.size() != null_basis.cols()) {
    throw InvalidProblemError("minimizer: expected " + std::to_string(null_basis.cols()) +
                              " null-space coordinates");
  }
  if (null_basis.cols() == 0) return x_star;
  return x_star + null_basis * coords;
}

Objective::Objective(std::string name, Index dimension, ValueFn value, GradientFn gradient,
                     double lipschitz, std::optional<MinNormOracle> oracle)
    : name_(std::move(name)),
      dimension_(dimension),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      lipschitz_(lipschitz),
      oracle_(std::move(oracle)) {
  if (dimension_ <= 0) throw InvalidProblemError(name_ + ": dimension must be positive");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) {
    throw InvalidProblemError(name_ + ": Lipschitz constant must be positive and finite");
  }
  if (!value_ || !gradient_) throw InvalidProblemError(name_ + ": missing value or gradient");
  if (oracle_ && oracle_->x_star.size() != dimension_) {
    throw InvalidProblemError(name_ + ": oracle dimension mismatch");
  }
}

Objective Objective::quadratic(std::string name, QuadraticForm form, double lipschitz,
                               std::optional<MinNormOracle> oracle, ValueFn value,
                               GradientFn gradient) {
  const Index n = form.hessian.rows();
  if (form.hessian.cols() != n || form.linear.size() != n) {
    throw InvalidProblemError(name + ": quadratic form dimension mismatch");
  }
  if (!value) {
    value = [H = form.hessian, g = form.linear, c = form.constant](const Vector& x) {
      return 0.5 * x.dot(H * x) - g.dot(x) + c;
    };
  }
  if (!gradient) {
    gradient = [H = form.hessian, g = form.linear](const Vector& x) -> Vector {
      return H * x - g;
    };
  }
  Objective obj(std::move(name), n, std::move(value), std::move(gradient), lipschitz,
                std::move(oracle));
  obj.form_ = std::move(form);
  return obj;
}

double Objective::value(const Vector& x) const {
  if (x.size() != dimension_) throw InvalidProblemError(name_ + ": point dimension mismatch");
  return value_(x);
}

Vector Objective::gradient(const Vector& x) const {
  if (x.size() != dimension_) throw InvalidProblemError(name_ + ": point dimension mismatch");
  return gradient_(x);
}

Objective& Objective::with_reported_lipschitz(double value) {
  lipschitz_paper_ = value;
  return *this;
}

const MinNormOracle& Objective::require_oracle() const {
  if (!oracle_) throw OracleFailureError(name_ + ": no min-norm oracle available");
  return *oracle_;
}

Objective paper_quadratic(double a, double b) {
  if (a == 0.0 || b == 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidProblemError("paper_quadratic: coefficients must be finite and nonzero");
  }
  Vector v(2);
  v << a, b;

  QuadraticForm form{2.0 * v * v.transpose(), Vector::Zero(2), 0.0};

  // argmin f is the line a x + b y = 0; the origin is its closest point.
  Matrix null_basis(2, 1);
  null_basis << -b, a;
  null_basis /= v.norm();
  MinNormOracle oracle{Vector::Zero(2), 0.0, null_basis};

  const double a2 = a * a;
  const double b2 = b * b;
  auto value = [v](const Vector& x) {
    const double r = v.dot(x);
    return r * r;
  };
  auto gradient = [v](const Vector& x) -> Vector { return 2.0 * v.dot(x) * v; };

  Objective obj = Objective::quadratic("paper_quadratic", std::move(form), 2.0 * (a2 + b2),
                                       std::move(oracle), value, gradient);
  obj.with_reported_lipschitz(2.0 * std::sqrt(2.0) * std::sqrt((a2 + b2) * std::max(a2, b2)));
  return obj;
}

Objective shifted_quadratic(const Vector& u) {
  const Index n = u.size();
  if (n == 0) throw InvalidProblemError("shifted_quadratic: empty shift vector");
  QuadraticForm form{Matrix::Identity(n, n), u, 0.5 * u.squaredNorm()};
  MinNormOracle oracle{u, 0.0, Matrix(n, 0)};
  auto value = [u](const Vector& x) { return 0.5 * (x - u).squaredNorm(); };
  auto gradient = [u](const Vector& x) -> Vector { return x - u; };
  return Objective::quadratic("shifted_quadratic", std::move(form), 1.0, std::move(oracle),
                              value, gradient);
}

Objective psd_quadratic(const Matrix& A, const Vector& b) {
  const Index n = A.rows();
  if (n == 0 || A.cols() != n || b.size() != n) {
    throw InvalidProblemError("psd_quadratic: A must be square and match b");
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidProblemError("psd_quadratic: A is not symmetric");
  }
  const Matrix sym = 0.5 * (A + A.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw InvalidProblemError("psd_quadratic: eigendecomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();  // ascending
  const Matrix& V = eig.eigenvectors();
  const double lambda_max = lambda(n - 1);
  if (!(lambda_max > 0.0)) throw InvalidProblemError("psd_quadratic: A has no positive eigenvalue");
  const double cutoff = 1e-10 * lambda_max;
  if (lambda(0) < -cutoff) throw InvalidProblemError("psd_quadratic: A is not positive semidefinite");

  Vector x_star = Vector::Zero(n);
  Index nullity = 0;
  for (Index i = 0; i < n; ++i) {
    if (lambda(i) > cutoff) {
      x_star += (V.col(i).dot(b) / lambda(i)) * V.col(i);
    } else {
      ++nullity;
    }
  }
  const double residual = (sym * x_star - b).norm();
  if (residual > 1e-9 * std::max(1.0, b.norm())) {
    throw UnboundedBelowError("psd_quadratic: b is not in range(A) (residual " +
                              std::to_string(residual) + ")");
  }
  // Eigenvalues are ascending, so the null directions are the leading columns.
  Matrix null_basis = V.leftCols(nullity);
  MinNormOracle oracle{x_star, -0.5 * b.dot(x_star), null_basis};

  return Objective::quadratic("psd_quadratic", QuadraticForm{sym, b, 0.0}, lambda_max,
                              std::move(oracle));
}

double regularized_value(const Objective& obj, double eps, const Vector& x) {
  return obj.value(x) + 0.5 * eps * x.squaredNorm();
}

Vector regularized_gradient(const Objective& obj, double eps, const Vector& x) {
  return obj.gradient(x) + eps * x;
}

TikhonovPoint tikhonov_point(const Objective& obj, double eps,
                             const TikhonovSolverOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw PreconditionError("tikhonov_point: eps must be positive");
  }
  const Index n = obj.dimension();

  if (const auto& form = obj.quadratic_form()) {
    Matrix system = form->hessian;
    system.diagonal().array() += eps;
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) {
      throw OracleFailureError("tikhonov_point: regularized Hessian is not positive definite");
    }
    Vector x = llt.solve(form->linear);
    // One step of iterative refinement for badly scaled Hessians.
    x += llt.solve(form->linear - system * x);
    return {eps, std::move(x)};
  }

  const double step = 1.0 / (obj.lipschitz() + eps);
  Vector x = Vector::Zero(n);
  for (Index it = 0; it < options.max_iterations; ++it) {
    const Vector g = regularized_gradient(obj, eps, x);
    if (!g.allFinite()) break;
    if (g.norm() <= options.gradient_tolerance) return {eps, std::move(x)};
    x -= step * g;
  }
  throw OracleFailureError("tikhonov_point: gradient descent did not reach tolerance for eps = " +
                           std::to_string(eps));
}

}  // namespace tiknest
