#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dmlreg/baselines.hpp"
#include "dmlreg/error.hpp"
#include "dmlreg/glm.hpp"
#include "oracles.hpp"

using namespace dmlreg;

static ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

static double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

static Vector binary_labels(Rng& rng, const Matrix& x, const Vector& theta) {
  const Vector z = x * theta;
  Vector y(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) y[i] = rng.uniform01() < oracle::sig(z[i]) ? 1.0 : 0.0;
  return y;
}

TEST_CASE("gaussian prior examples") {
  Matrix x(1, 1);
  x << 1;
  Vector y(1);
  y << 2;
  CHECK(fit_linreg_gaussian(x, y, DiagonalMetric::identity(1)).coefficients[0] ==
        doctest::Approx(1.0));

  Rng rng(1);
  const Matrix xr = oracle::random_matrix(rng, 30, 5);
  CHECK(fit_linreg_gaussian(xr, Vector::Zero(30), DiagonalMetric::identity(5)).coefficients.isZero());
  CHECK(fit_linreg_laplace(xr, Vector::Zero(30), DiagonalMetric::identity(5)).coefficients.isZero());
}

TEST_CASE("vanishing penalty approaches least squares") {
  Rng rng(2);
  const Matrix x = oracle::random_matrix(rng, 40, 6);
  const Vector y = oracle::random_matrix(rng, 40, 1).col(0);
  const Vector ols = x.colPivHouseholderQr().solve(y);
  const DiagonalMetric huge(Vector::Constant(6, 1e12));
  CHECK(rel_err(fit_linreg_gaussian(x, y, huge).coefficients, ols) < 1e-6);
  CHECK(rel_err(fit_linreg_laplace(x, y, huge).coefficients, ols) < 1e-5);
  CHECK(rel_err(fit_ols(x, y).coefficients, ols) < 1e-10);
}

TEST_CASE("uniform gaussian prior is ridge") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(50));
    const Eigen::Index m = 10 + static_cast<Eigen::Index>(rng.below(60));
    const Matrix x = oracle::random_matrix(rng, m, n);
    const Vector y = oracle::random_matrix(rng, m, 1).col(0);
    const double lambda = std::pow(10.0, -3.0 + 5.0 * rng.uniform01());
    const Vector expect = oracle::ridge(x, y, Vector::Constant(n, lambda));
    CHECK(rel_err(fit_ridge(x, y, lambda).coefficients, expect) <= 1e-10);
    CHECK(rel_err(fit_linreg_gaussian(x, y, DiagonalMetric(Vector::Constant(n, 1 / lambda))).coefficients,
                  expect) <= 1e-10);
  }
}

TEST_CASE("normal equations hold for arbitrary metrics") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(40));
    const Eigen::Index m = 5 + static_cast<Eigen::Index>(rng.below(80));
    const Matrix x = oracle::random_matrix(rng, m, n);
    const Vector y = 5 * oracle::random_matrix(rng, m, 1).col(0);
    const DiagonalMetric a(sample_uniform(rng, 0.01, 10, n));
    const Vector theta = fit_linreg_gaussian(x, y, a).coefficients;
    const Vector xty = x.transpose() * y;
    const Vector res = x.transpose() * (x * theta) + penalty_weights(a, 1e-6).cwiseProduct(theta) - xty;
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-8 * std::max(1.0, xty.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("laplace prior with identity metric is lasso(1)") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(20));
    const Matrix x = oracle::random_matrix(rng, 25, n);
    const Vector y = 3 * oracle::random_matrix(rng, 25, 1).col(0);
    const Vector p = Vector::Ones(n);
    const double best = linreg_laplace_objective(x, y, p, oracle::lasso_cd(x, y, p));
    const FittedModel f = fit_linreg_laplace(x, y, DiagonalMetric::identity(n));
    CHECK(std::abs(f.diagnostics.objective - best) <= 1e-3);
    CHECK(linreg_laplace_objective(x, y, p, f.coefficients) == doctest::Approx(f.diagnostics.objective));
    CHECK(std::abs(linreg_laplace_objective(x, y, p, fit_lasso(x, y, 1.0).coefficients) - best) <= 1e-3);
  }
}

TEST_CASE("subgradient solver reaches the lasso optimum on a well-scaled problem") {
  Rng rng(6);
  const Matrix x = oracle::random_matrix(rng, 50, 5) / std::sqrt(50.0);
  Vector theta(5);
  theta << 2, -1, 0, 0, 0.5;
  const Vector y = x * theta + 0.1 * oracle::random_matrix(rng, 50, 1).col(0);
  const Vector p = Vector::Constant(5, 0.1);
  const double best = linreg_laplace_objective(x, y, p, oracle::lasso_cd(x, y, p));
  FitOptions o;
  o.laplace_solver = LaplaceSolver::Subgradient;
  o.subgradient_step = 0.1;
  o.max_iterations = 200000;
  const FittedModel f = fit_linreg_laplace(x, y, DiagonalMetric(Vector::Constant(5, 10.0)), o);
  CHECK(f.diagnostics.objective - best <= 1e-3 * std::max(1.0, best));
  CHECK(f.diagnostics.objective >= best - 1e-9);
}

TEST_CASE("shrinkage grows with the penalty") {
  Rng rng(7);
  const Matrix x = oracle::random_matrix(rng, 30, 8);
  const Vector y = 4 * oracle::random_matrix(rng, 30, 1).col(0);
  double last_l2 = INFINITY, last_l1 = INFINITY;
  for (double a : {100.0, 10.0, 1.0, 0.1, 0.01}) {
    const DiagonalMetric m(Vector::Constant(8, a));
    const double l2 = fit_linreg_gaussian(x, y, m).coefficients.norm();
    const double l1 = fit_linreg_laplace(x, y, m).coefficients.lpNorm<1>();
    CHECK(l2 <= last_l2 + 1e-12);
    CHECK(l1 <= last_l1 + 1e-6);
    last_l2 = l2;
    last_l1 = l1;
  }
  CHECK(fit_linreg_laplace(x, y, DiagonalMetric(Vector::Constant(8, 1e-6))).coefficients.isZero());
}

TEST_CASE("column permutation permutes the coefficients") {
  Rng rng(8);
  const Matrix x = oracle::random_matrix(rng, 30, 6);
  const Vector y = oracle::random_matrix(rng, 30, 1).col(0);
  const Vector a = sample_uniform(rng, 0.1, 3, 6);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
  perm.indices() << 3, 0, 5, 1, 4, 2;
  const Matrix xp = x * perm;
  const Vector ap = perm.transpose() * a;
  for (auto fitter : {&fit_linreg_gaussian, &fit_linreg_laplace}) {
    const Vector t1 = fitter(x, y, DiagonalMetric(a), {}).coefficients;
    const Vector t2 = fitter(xp, y, DiagonalMetric(ap), {}).coefficients;
    CHECK(rel_err(perm * t2, t1) < 1e-6);
  }
}

TEST_CASE("intercept and standardization") {
  Rng rng(9);
  const Matrix x = oracle::random_matrix(rng, 40, 3);
  Vector theta(3);
  theta << 1, -2, 3;
  const Vector y = (x * theta).array() + 5.0;
  FitOptions o;
  o.fit_intercept = true;
  const FittedModel f = fit(ModelSpec{Likelihood::GaussianLinear, Prior::None, {}}, x, y, o);
  CHECK(f.intercept == doctest::Approx(5.0));
  CHECK(rel_err(f.coefficients, theta) < 1e-10);
  CHECK(rel_err(predict(f, x), y) < 1e-10);

  Matrix xs = x;
  xs.col(1) *= 1000.0;
  o.standardize = true;
  const FittedModel g = fit(ModelSpec{Likelihood::GaussianLinear, Prior::None, {}}, xs, y, o);
  CHECK(g.coefficients[1] == doctest::Approx(-2e-3));
  CHECK(g.intercept == doctest::Approx(5.0));
}

TEST_CASE("logistic examples") {
  Matrix x = Matrix::Zero(6, 2);
  Vector y(6);
  y << 1, 0, 1, 0, 1, 0;
  CHECK(fit_logreg_gaussian(x, y, DiagonalMetric::identity(2)).coefficients.norm() < 1e-12);
  CHECK(fit_logreg_laplace(x, y, DiagonalMetric::identity(2)).coefficients.norm() < 1e-12);

  y << 0, 2, 1, 0, 1, 0;
  CHECK(code_of([&] { fit_logreg_gaussian(x, y, DiagonalMetric::identity(2)); }) ==
        ErrorCode::NonBinaryResponse);
}

TEST_CASE("separable one-feature data stays finite under a gaussian prior") {
  Matrix x(4, 1);
  x << -2, -1, 1, 2;
  Vector y(4);
  y << 0, 0, 1, 1;
  const double a = 3.0;
  const double expect = oracle::increasing_root([&](double t) {
    double g = t / a;
    for (int i = 0; i < 4; ++i) g += x(i, 0) * (oracle::sig(x(i, 0) * t) - y[i]);
    return g;
  });
  const FittedModel f = fit_logreg_gaussian(x, y, DiagonalMetric(Vector::Constant(1, a)));
  CHECK(std::isfinite(f.coefficients[0]));
  CHECK(f.coefficients[0] == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("logistic gradients match central differences") {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(10));
    const Matrix x = oracle::random_matrix(rng, 30, n);
    const Vector theta = oracle::random_matrix(rng, n, 1).col(0);
    const Vector y = binary_labels(rng, x, theta);
    const Vector p = sample_uniform(rng, 0.1, 5, n);
    const Vector point = 2 * oracle::random_matrix(rng, n, 1).col(0);
    const double h = 1e-5;
    Vector fd_nll(n), fd_gauss(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector up = point, dn = point;
      up[j] += h;
      dn[j] -= h;
      fd_nll[j] = (logistic_nll(x, y, up) - logistic_nll(x, y, dn)) / (2 * h);
      fd_gauss[j] = (logreg_gaussian_objective(x, y, p, up) - logreg_gaussian_objective(x, y, p, dn)) / (2 * h);
    }
    CHECK(rel_err(logistic_nll_gradient(x, y, point), fd_nll) < 1e-5);
    CHECK(rel_err(logreg_gaussian_gradient(x, y, p, point), fd_gauss) < 1e-5);
    CHECK(logistic_nll(x, y, point) == doctest::Approx(oracle::nll(x, y, point)).epsilon(1e-12));
  }
}

TEST_CASE("laplace logistic fit matches a coordinate-descent oracle") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(8));
    const Matrix x = oracle::random_matrix(rng, 60, n);
    const Vector y = binary_labels(rng, x, 1.5 * oracle::random_matrix(rng, n, 1).col(0));
    const Vector p = Vector::Ones(n);
    const double best = logreg_laplace_objective(x, y, p, oracle::logistic_l1_cd(x, y, p));
    const FittedModel f = fit_logreg_laplace(x, y, DiagonalMetric::identity(n));
    CHECK(std::abs(f.diagnostics.objective - best) <= 1e-3);
  }
}

TEST_CASE("logistic fits with huge prior scales are unpenalized") {
  Rng rng(12);
  const Matrix x = oracle::random_matrix(rng, 300, 3);
  Vector theta(3);
  theta << 1, -0.5, 0.25;
  const Vector y = binary_labels(rng, x, theta);
  const Vector expect = oracle::logistic_newton(x, y);
  const DiagonalMetric huge(Vector::Constant(3, 1e12));
  CHECK((fit_logreg_gaussian(x, y, huge).coefficients - expect).lpNorm<Eigen::Infinity>() < 1e-3);
  CHECK((fit_logreg_laplace(x, y, huge).coefficients - expect).lpNorm<Eigen::Infinity>() < 1e-3);
  const FittedModel none = fit(ModelSpec{Likelihood::BernoulliLogistic, Prior::None, {}}, x, y);
  CHECK((none.coefficients - expect).lpNorm<Eigen::Infinity>() < 1e-3);
}

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0) == 0.5);
  for (double z : {0.3, 2.0, 17.0, 40.0}) CHECK(sigmoid(z) + sigmoid(-z) == doctest::Approx(1.0));
  CHECK(sigmoid(710) > 0);
  CHECK(sigmoid(710) <= 1);
  CHECK(std::isfinite(sigmoid(-710)));
  CHECK(sigmoid(-710) >= 0);
}

TEST_CASE("predict and mse") {
  FittedModel lin;
  lin.coefficients = Vector::Zero(2);
  const Matrix x = Matrix::Constant(3, 2, 4.0);
  CHECK(predict(lin, x).isZero());
  FittedModel logit = lin;
  logit.spec.likelihood = Likelihood::BernoulliLogistic;
  CHECK((predict(logit, x).array() == 0.5).all());

  FittedModel one;
  one.coefficients = Vector::Constant(1, 2.0);
  CHECK(predict(one, Matrix::Constant(1, 1, 3.0))[0] == 6.0);
  CHECK(code_of([&] { predict(one, x); }) == ErrorCode::DimensionMismatch);

  CHECK(mse(Vector::Zero(3), Vector::Zero(3)) == 0.0);
  CHECK(mse(Vector::Zero(2), Vector::Ones(2)) == 1.0);
  CHECK(mse(Vector::Zero(1), Vector::Constant(1, 3.0)) == 9.0);
  CHECK(code_of([] { mse(Vector::Zero(1), Vector::Zero(2)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("penalty weights and parsing") {
  Vector a(3);
  a << 0.0, 2.0, INFINITY;
  const Vector p = penalty_weights(DiagonalMetric(a), 1e-6);
  CHECK(p[0] == 1e6);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == 0.0);
  CHECK(parse_likelihood("logreg") == Likelihood::BernoulliLogistic);
  CHECK(parse_prior("laplace") == Prior::Laplace);
  CHECK(code_of([] { parse_prior("cauchy"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] {
          fit_linreg_gaussian(Matrix::Zero(3, 2), Vector::Zero(2), DiagonalMetric::identity(2));
        }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] {
          fit_linreg_gaussian(Matrix::Zero(3, 2), Vector::Zero(3), DiagonalMetric::identity(3));
        }) == ErrorCode::DimensionMismatch);
}
