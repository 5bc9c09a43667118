#include <cmath>

#include <doctest.h>

#include "tiknest/problems.hpp"

using namespace tiknest;

namespace {
Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("paper_quadratic constants and oracle") {
  const Objective f = paper_quadratic(1.0, 5.0);
  CHECK(f.dimension() == 2);
  CHECK(f.lipschitz() == doctest::Approx(52.0).epsilon(1e-15));
  CHECK(f.value(v2(1.0, 1.0)) == doctest::Approx(36.0));
  CHECK(f.gradient(v2(1.0, 1.0)).isApprox(v2(12.0, 60.0)));
  const MinNormOracle& o = f.require_oracle();
  CHECK(o.x_star.norm() == 0.0);
  CHECK(o.min_value == 0.0);
  REQUIRE(o.null_basis.cols() == 1);
  const Vector other = o.minimizer(Vector::Constant(1, 3.0));
  CHECK(std::abs(f.value(other)) < 1e-24);
  CHECK(other.norm() == doctest::Approx(3.0));
}

TEST_CASE("paper_quadratic Lipschitz bounds for the first benchmark") {
  const Objective f = paper_quadratic(0.1, 100.0);
  CHECK(f.lipschitz() == doctest::Approx(20000.02).epsilon(1e-14));
  REQUIRE(f.lipschitz_paper());
  CHECK(*f.lipschitz_paper() == doctest::Approx(28284.28538959399).epsilon(1e-14));
}

TEST_CASE("paper_quadratic rejects zero coefficients") {
  CHECK_THROWS_AS(paper_quadratic(0.0, 1.0), InvalidProblemError);
  CHECK_THROWS_AS(paper_quadratic(1.0, 0.0), InvalidProblemError);
}

TEST_CASE("shifted_quadratic") {
  const Vector u = v2(2.0, -3.0);
  const Objective f = shifted_quadratic(u);
  CHECK(f.lipschitz() == 1.0);
  CHECK(f.require_oracle().x_star.isApprox(u));
  CHECK(f.value(Vector::Zero(2)) == doctest::Approx(6.5));
  const TikhonovPoint p = tikhonov_point(f, 0.5);
  CHECK((p.point - u / 1.5).norm() < 1e-14);
}

TEST_CASE("psd_quadratic min-norm solution and unboundedness") {
  Matrix A(3, 3);
  A << 2, 0, 0, 0, 1, 1, 0, 1, 1;
  const Objective f = psd_quadratic(A, Eigen::Vector3d(2.0, 1.0, 1.0));
  const MinNormOracle& o = f.require_oracle();
  CHECK((o.x_star - Eigen::Vector3d(1.0, 0.5, 0.5)).norm() < 1e-12);
  CHECK(o.min_value == doctest::Approx(-1.5));
  CHECK(o.null_basis.cols() == 1);
  CHECK(f.lipschitz() == doctest::Approx(2.0));
  CHECK_THROWS_AS(psd_quadratic(A, Eigen::Vector3d(0.0, 1.0, -1.0)), UnboundedBelowError);

  Matrix bad(2, 2);
  bad << 1, 2, 0, 1;
  CHECK_THROWS_AS(psd_quadratic(bad, Vector::Zero(2)), InvalidProblemError);
  Matrix neg(2, 2);
  neg << 1, 0, 0, -1;
  CHECK_THROWS_AS(psd_quadratic(neg, Vector::Zero(2)), InvalidProblemError);
}

TEST_CASE("tikhonov_point satisfies the regularized optimality condition") {
  const Objective f = paper_quadratic(1.0, 5.0);
  for (double eps : {1.0, 1e-2, 1e-5}) {
    const TikhonovPoint p = tikhonov_point(f, eps);
    CHECK(regularized_gradient(f, eps, p.point).norm() < 1e-10);
  }
}

TEST_CASE("tikhonov_point falls back to gradient descent for general objectives") {
  Objective f(
      "logcosh", 2,
      [](const Vector& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += std::log(std::cosh(x(i) - 1.0));
        return s;
      },
      [](const Vector& x) -> Vector { return (x.array() - 1.0).tanh().matrix(); }, 1.0);
  const TikhonovPoint p = tikhonov_point(f, 0.1);
  CHECK(regularized_gradient(f, 0.1, p.point).norm() <= 1e-12);
  CHECK_THROWS_AS(tikhonov_point(f, 0.1, {1e-30, 10}), OracleFailureError);
  CHECK_THROWS_AS(f.require_oracle(), OracleFailureError);
}

TEST_CASE("regularized value and gradient") {
  const Objective f = shifted_quadratic(v2(1.0, 0.0));
  const Vector x = v2(3.0, 4.0);
  CHECK(regularized_value(f, 0.2, x) == doctest::Approx(f.value(x) + 0.1 * 25.0));
  CHECK(regularized_gradient(f, 0.2, x).isApprox(f.gradient(x) + 0.2 * x));
}
