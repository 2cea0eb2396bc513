#include "dmlreg/glm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "dmlreg/error.hpp"

namespace dmlreg {

const char* to_string(Likelihood l) {
  return l == Likelihood::GaussianLinear ? "gaussian-linear" : "bernoulli-logistic";
}

const char* to_string(Prior p) {
  switch (p) {
    case Prior::Gaussian: return "gaussian";
    case Prior::Laplace: return "laplace";
    case Prior::None: return "none";
  }
  return "none";
}

Likelihood parse_likelihood(const std::string& s) {
  if (s == "gaussian-linear" || s == "linreg") return Likelihood::GaussianLinear;
  if (s == "bernoulli-logistic" || s == "logreg") return Likelihood::BernoulliLogistic;
  fail(ErrorCode::InvalidConfig, "unknown likelihood '" + s + "'");
}

Prior parse_prior(const std::string& s) {
  if (s == "gaussian") return Prior::Gaussian;
  if (s == "laplace") return Prior::Laplace;
  if (s == "none") return Prior::None;
  fail(ErrorCode::InvalidConfig, "unknown prior '" + s + "'");
}

Vector penalty_weights(const DiagonalMetric& metric, double floor) {
  Vector out(metric.size());
  for (Eigen::Index j = 0; j < metric.size(); ++j) {
    out[j] = 1.0 / std::max(metric.weights()[j], floor);
  }
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void check_options(const FitOptions& opts) {
  if (opts.max_iterations < 1 || !(opts.learning_rate > 0.0) ||
      !(opts.tolerance > 0.0) || !(opts.objective_tolerance > 0.0) ||
      !(opts.prior_floor > 0.0) || !(opts.subgradient_step > 0.0)) {
    fail(ErrorCode::InvalidHyperparameter, "fit options must all be positive");
  }
}

void check_inputs(const Matrix& x, const Vector& y, const DiagonalMetric& metric) {
  if (x.rows() != y.size()) {
    fail(ErrorCode::DimensionMismatch, "X has " + std::to_string(x.rows()) +
                                           " rows, y has " + std::to_string(y.size()));
  }
  if (metric.size() != x.cols()) {
    fail(ErrorCode::DimensionMismatch, "metric has " + std::to_string(metric.size()) +
                                           " weights, X has " +
                                           std::to_string(x.cols()) + " columns");
  }
  if (!x.allFinite() || !y.allFinite()) {
    fail(ErrorCode::NonFiniteInput, "X and y must be finite");
  }
}

void check_binary(const Vector& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      fail(ErrorCode::NonBinaryResponse,
           "response " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

// Working design after optional standardization and intercept column.
struct Design {
  Matrix x;
  Vector penalty;
  Vector column_scale;
  bool intercept = false;
};

Design prepare(const Matrix& x, const DiagonalMetric& metric, const FitOptions& opts) {
  Design d;
  const Eigen::Index n = x.cols();
  d.column_scale = Vector::Ones(n);
  if (opts.standardize && x.rows() > 1) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double mean = x.col(j).mean();
      const double sd = std::sqrt((x.col(j).array() - mean).square().mean());
      if (sd > 0.0) d.column_scale[j] = sd;
    }
  }
  d.intercept = opts.fit_intercept;
  d.x.resize(x.rows(), n + (d.intercept ? 1 : 0));
  d.x.leftCols(n) = x * d.column_scale.cwiseInverse().asDiagonal();
  d.penalty.resize(d.x.cols());
  d.penalty.head(n) = penalty_weights(metric, opts.prior_floor);
  if (d.intercept) {
    d.x.col(n).setOnes();
    d.penalty[n] = 0.0;
  }
  return d;
}

FittedModel finish(const Design& d, const Vector& theta, ModelSpec spec,
                   FitDiagnostics diag) {
  FittedModel model;
  const Eigen::Index n = d.column_scale.size();
  model.coefficients = theta.head(n).cwiseQuotient(d.column_scale);
  model.intercept = d.intercept ? theta[n] : 0.0;
  model.spec = std::move(spec);
  model.diagnostics = diag;
  return model;
}

double max_eigenvalue_gram(const Matrix& x) {
  if (x.cols() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.transpose() * x, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Vector soft_threshold(const Vector& v, const Vector& tau) {
  return v.cwiseSign().cwiseProduct((v.cwiseAbs() - tau).cwiseMax(0.0));
}

double l1_term(const Vector& penalty, const Vector& theta) {
  return penalty.cwiseProduct(theta.cwiseAbs()).sum();
}

using ValueFn = std::function<double(const Vector&)>;
using GradFn = std::function<Vector(const Vector&)>;

// Accelerated proximal gradient with backtracking and function-value
// restart, so F(x_k) never increases and the last iterate is the best one.
FitDiagnostics minimize_l1_proximal(const ValueFn& smooth, const GradFn& grad,
                                    double lipschitz, const Vector& penalty,
                                    Vector& theta, const FitOptions& opts) {
  FitDiagnostics diag;
  double L = std::max(lipschitz, 1e-12);
  Vector x = theta;
  Vector z = x;
  double t = 1.0;
  double fx = smooth(x);
  double obj_x = fx + l1_term(penalty, x);

  for (int k = 0; k < opts.max_iterations; ++k) {
    diag.iterations = k + 1;
    const Vector gz = grad(z);
    const double fz = smooth(z);
    Vector xn;
    double fxn = 0.0;
    for (;;) {
      xn = soft_threshold(z - gz / L, penalty / L);
      const Vector dlt = xn - z;
      fxn = smooth(xn);
      if (fxn <= fz + gz.dot(dlt) + 0.5 * L * dlt.squaredNorm() + 1e-12 * std::abs(fz)) break;
      L *= 2.0;
    }
    const double mapping = L * (xn - z).cwiseAbs().maxCoeff();
    const double obj_n = fxn + l1_term(penalty, xn);

    if (obj_n > obj_x) {
      // Momentum overshoot: restart from the current iterate.
      if (t == 1.0 && (z - x).squaredNorm() == 0.0) {
        // A plain proximal step from x did not improve: x is optimal to
        // working precision.
        diag.converged = true;
        break;
      }
      z = x;
      t = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = xn + ((t - 1.0) / tn) * (xn - x);
    x = std::move(xn);
    t = tn;
    obj_x = obj_n;
    if (mapping <= opts.tolerance) {
      diag.converged = true;
      break;
    }
  }
  theta = x;
  diag.objective = obj_x;
  return diag;
}

// Subgradient method with steps alpha0 / sqrt(t) and best-iterate tracking.
// The subgradient of |theta_j| at zero is taken as 0.
FitDiagnostics minimize_l1_subgradient(const ValueFn& smooth, const GradFn& grad,
                                       const Vector& penalty, Vector& theta,
                                       const FitOptions& opts) {
  FitDiagnostics diag;
  Vector x = theta;
  double prev = smooth(x) + l1_term(penalty, x);
  Vector best = x;
  double best_obj = prev;
  for (int t = 1; t <= opts.max_iterations; ++t) {
    diag.iterations = t;
    const Vector g = grad(x) + penalty.cwiseProduct(x.cwiseSign());
    x -= (opts.subgradient_step / std::sqrt(static_cast<double>(t))) * g;
    const double obj = smooth(x) + l1_term(penalty, x);
    if (!std::isfinite(obj)) break;
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
    if (std::abs(obj - prev) <= opts.objective_tolerance * std::max(1.0, std::abs(prev))) {
      diag.converged = true;
      break;
    }
    prev = obj;
  }
  theta = best;
  diag.objective = best_obj;
  return diag;
}

FitDiagnostics minimize_l1(const ValueFn& smooth, const GradFn& grad, double lipschitz,
                           const Vector& penalty, Vector& theta, const FitOptions& opts) {
  if (opts.laplace_solver == LaplaceSolver::Subgradient) {
    return minimize_l1_subgradient(smooth, grad, penalty, theta, opts);
  }
  return minimize_l1_proximal(smooth, grad, lipschitz, penalty, theta, opts);
}

Vector sigmoid_vec(const Vector& z) { return z.unaryExpr([](double v) { return sigmoid(v); }); }

}  // namespace

double linreg_gaussian_objective(const Matrix& x, const Vector& y, const Vector& penalty,
                                 const Vector& theta) {
  return (y - x * theta).squaredNorm() + penalty.dot(theta.cwiseAbs2());
}

double linreg_laplace_objective(const Matrix& x, const Vector& y, const Vector& penalty,
                                const Vector& theta) {
  return (y - x * theta).squaredNorm() + l1_term(penalty, theta);
}

double logistic_nll(const Matrix& x, const Vector& y, const Vector& theta) {
  const Vector z = x * theta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z[i]) - y[i] * z[i];
  return total;
}

Vector logistic_nll_gradient(const Matrix& x, const Vector& y, const Vector& theta) {
  return x.transpose() * (sigmoid_vec(x * theta) - y);
}

double logreg_gaussian_objective(const Matrix& x, const Vector& y, const Vector& penalty,
                                 const Vector& theta) {
  return logistic_nll(x, y, theta) + 0.5 * penalty.dot(theta.cwiseAbs2());
}

Vector logreg_gaussian_gradient(const Matrix& x, const Vector& y, const Vector& penalty,
                                const Vector& theta) {
  return logistic_nll_gradient(x, y, theta) + penalty.cwiseProduct(theta);
}

double logreg_laplace_objective(const Matrix& x, const Vector& y, const Vector& penalty,
                                const Vector& theta) {
  return logistic_nll(x, y, theta) + l1_term(penalty, theta);
}

FittedModel fit_linreg_gaussian(const Matrix& x, const Vector& y,
                                const DiagonalMetric& metric, const FitOptions& opts) {
  check_options(opts);
  check_inputs(x, y, metric);
  const Design d = prepare(x, metric, opts);
  Matrix h = d.x.transpose() * d.x;
  h.diagonal() += d.penalty;
  const Vector theta = solve_linear(h, d.x.transpose() * y);
  FitDiagnostics diag;
  diag.objective = linreg_gaussian_objective(d.x, y, d.penalty, theta);
  diag.iterations = 1;
  diag.converged = true;
  return finish(d, theta, {Likelihood::GaussianLinear, Prior::Gaussian, metric}, diag);
}

FittedModel fit_linreg_laplace(const Matrix& x, const Vector& y,
                               const DiagonalMetric& metric, const FitOptions& opts) {
  check_options(opts);
  check_inputs(x, y, metric);
  const Design d = prepare(x, metric, opts);
  const Matrix gram = d.x.transpose() * d.x;
  const Vector xty = d.x.transpose() * y;
  const double yy = y.squaredNorm();
  // ||y - X theta||^2 expanded through the Gram matrix.
  const ValueFn smooth = [&](const Vector& th) {
    return std::max(0.0, yy - 2.0 * xty.dot(th) + th.dot(gram * th));
  };
  const GradFn grad = [&](const Vector& th) -> Vector { return 2.0 * (gram * th - xty); };
  Vector theta = Vector::Zero(d.x.cols());
  FitDiagnostics diag =
      minimize_l1(smooth, grad, 2.0 * max_eigenvalue_gram(d.x), d.penalty, theta, opts);
  diag.objective = linreg_laplace_objective(d.x, y, d.penalty, theta);
  return finish(d, theta, {Likelihood::GaussianLinear, Prior::Laplace, metric}, diag);
}

FittedModel fit_logreg_gaussian(const Matrix& x, const Vector& y,
                                const DiagonalMetric& metric, const FitOptions& opts) {
  check_options(opts);
  check_inputs(x, y, metric);
  check_binary(y);
  const Design d = prepare(x, metric, opts);

  // Per-coordinate curvature bound.
  Vector scale = 0.25 * d.x.colwise().squaredNorm().transpose() + d.penalty;
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (!(scale[j] > 0.0)) scale[j] = 1.0;
  }
  Vector theta = Vector::Zero(d.x.cols());
  double objective = logreg_gaussian_objective(d.x, y, d.penalty, theta);
  Vector grad = logreg_gaussian_gradient(d.x, y, d.penalty, theta);
  double rate = opts.learning_rate;
  FitDiagnostics diag;
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (grad.norm() <= opts.tolerance) {
      diag.converged = true;
      break;
    }
    diag.iterations = it + 1;
    // theta + rate * ([y - sigma(X theta)] X - A^{-1} theta), coordinate-scaled.
    const Vector dir = grad.cwiseQuotient(scale);
    Vector candidate = theta - rate * dir;
    double cand_obj = logreg_gaussian_objective(d.x, y, d.penalty, candidate);
    // Near the optimum decreases fall below round-off; allow a few ulps.
    const double limit = objective + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(objective);
    while (!(cand_obj <= limit) && rate > std::numeric_limits<double>::min()) {
      rate *= 0.5;
      candidate = theta - rate * dir;
      cand_obj = logreg_gaussian_objective(d.x, y, d.penalty, candidate);
    }
    if (!(cand_obj <= limit)) break;
    theta = std::move(candidate);
    objective = cand_obj;
    grad = logreg_gaussian_gradient(d.x, y, d.penalty, theta);
    rate *= 1.25;
  }
  if (!diag.converged && grad.norm() <= opts.tolerance) diag.converged = true;
  diag.objective = objective;
  return finish(d, theta, {Likelihood::BernoulliLogistic, Prior::Gaussian, metric}, diag);
}

FittedModel fit_logreg_laplace(const Matrix& x, const Vector& y,
                               const DiagonalMetric& metric, const FitOptions& opts) {
  check_options(opts);
  check_inputs(x, y, metric);
  check_binary(y);
  const Design d = prepare(x, metric, opts);
  const ValueFn smooth = [&](const Vector& th) { return logistic_nll(d.x, y, th); };
  const GradFn grad = [&](const Vector& th) { return logistic_nll_gradient(d.x, y, th); };
  Vector theta = Vector::Zero(d.x.cols());
  FitDiagnostics diag =
      minimize_l1(smooth, grad, 0.25 * max_eigenvalue_gram(d.x), d.penalty, theta, opts);
  diag.objective = logreg_laplace_objective(d.x, y, d.penalty, theta);
  return finish(d, theta, {Likelihood::BernoulliLogistic, Prior::Laplace, metric}, diag);
}

FittedModel fit(const ModelSpec& spec, const Matrix& x, const Vector& y,
                const FitOptions& opts) {
  if (spec.prior == Prior::None) {
    const DiagonalMetric flat(Vector::Constant(x.cols(), std::numeric_limits<double>::infinity()));
    FittedModel model = spec.likelihood == Likelihood::GaussianLinear
                            ? fit_linreg_gaussian(x, y, flat, opts)
                            : fit_logreg_gaussian(x, y, flat, opts);
    model.spec.prior = Prior::None;
    return model;
  }
  if (spec.likelihood == Likelihood::GaussianLinear) {
    return spec.prior == Prior::Gaussian ? fit_linreg_gaussian(x, y, spec.metric, opts)
                                         : fit_linreg_laplace(x, y, spec.metric, opts);
  }
  return spec.prior == Prior::Gaussian ? fit_logreg_gaussian(x, y, spec.metric, opts)
                                       : fit_logreg_laplace(x, y, spec.metric, opts);
}

Vector predict(const FittedModel& model, const Matrix& x_new) {
  if (x_new.cols() != model.coefficients.size()) {
    fail(ErrorCode::DimensionMismatch,
         "model has " + std::to_string(model.coefficients.size()) +
             " coefficients, X has " + std::to_string(x_new.cols()) + " columns");
  }
  Vector z = x_new * model.coefficients;
  z.array() += model.intercept;
  if (model.spec.likelihood == Likelihood::BernoulliLogistic) return sigmoid_vec(z);
  return z;
}

double mse(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) {
    fail(ErrorCode::DimensionMismatch, "mse: vectors of different length");
  }
  if (y_true.size() == 0) return 0.0;
  return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

}  // namespace dmlreg
