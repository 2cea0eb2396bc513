#pragma once

#include <string>

#include "dmlreg/metric_learning.hpp"
#include "dmlreg/numerics.hpp"

namespace dmlreg {

enum class Likelihood { GaussianLinear, BernoulliLogistic };
enum class Prior { Gaussian, Laplace, None };

/// How L1-penalized objectives are minimized. `Proximal` is an accelerated
/// proximal-gradient method (soft-thresholding handles the |theta_j| terms
/// exactly); `Subgradient` is the plain subgradient method with diminishing
/// steps alpha0 / sqrt(t).
enum class LaplaceSolver { Proximal, Subgradient };

const char* to_string(Likelihood l);
const char* to_string(Prior p);
Likelihood parse_likelihood(const std::string& s);
Prior parse_prior(const std::string& s);

struct ModelSpec {
  Likelihood likelihood = Likelihood::GaussianLinear;
  Prior prior = Prior::Gaussian;
  DiagonalMetric metric;
};

struct FitDiagnostics {
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct FittedModel {
  Vector coefficients;
  double intercept = 0.0;
  ModelSpec spec;
  FitDiagnostics diagnostics;
};

struct FitOptions {
  int max_iterations = 50000;
  /// Initial learning rate of logistic gradient descent.
  double learning_rate = 1e-2;
  /// Gradient-norm tolerance (logistic gradient descent) or gradient-mapping
  /// tolerance (proximal solver).
  double tolerance = 1e-6;
  /// Relative objective-change stop of the subgradient method.
  double objective_tolerance = 1e-8;
  /// Prior scales below this are raised to it before inversion.
  double prior_floor = 1e-6;
  LaplaceSolver laplace_solver = LaplaceSolver::Proximal;
  /// alpha0 of the subgradient step schedule alpha0 / sqrt(t).
  double subgradient_step = 1e-3;
  /// Adds an unpenalized constant column.
  bool fit_intercept = false;
  /// Divides every column by its standard deviation before fitting;
  /// coefficients are reported on the original scale.
  bool standardize = false;
};

/// Per-coefficient penalty weights 1 / max(A_jj, floor); infinite A_jj gives 0.
Vector penalty_weights(const DiagonalMetric& metric, double floor);

/// Numerically stable logistic function.
double sigmoid(double z);

/// Gaussian prior, Gaussian likelihood: solves (X^T X + A^{-1}) theta = X^T y.
FittedModel fit_linreg_gaussian(const Matrix& x, const Vector& y,
                                const DiagonalMetric& metric,
                                const FitOptions& opts = {});

/// Laplace prior, Gaussian likelihood:
/// minimizes ||y - X theta||^2 + sum_j |theta_j| / A_jj.
FittedModel fit_linreg_laplace(const Matrix& x, const Vector& y,
                               const DiagonalMetric& metric,
                               const FitOptions& opts = {});

/// Gaussian prior, Bernoulli likelihood: batch gradient ascent on
/// sum_i log p(y_i | sigma(theta^T x_i)) - 1/2 sum_j theta_j^2 / A_jj.
/// Coordinates are scaled by a curvature bound; the learning rate is halved
/// whenever the objective would get worse and grows by 1.25 otherwise.
FittedModel fit_logreg_gaussian(const Matrix& x, const Vector& y,
                                const DiagonalMetric& metric,
                                const FitOptions& opts = {});

/// Laplace prior, Bernoulli likelihood: minimizes the negative
/// log-likelihood plus sum_j |theta_j| / A_jj.
FittedModel fit_logreg_laplace(const Matrix& x, const Vector& y,
                               const DiagonalMetric& metric,
                               const FitOptions& opts = {});

/// Dispatches on spec.likelihood and spec.prior. Prior::None fits the
/// unpenalized model (infinite prior scales).
FittedModel fit(const ModelSpec& spec, const Matrix& x, const Vector& y,
                const FitOptions& opts = {});

// Objectives and gradients, exposed for diagnostics and tests. `penalty`
// holds the weights from penalty_weights().

double linreg_gaussian_objective(const Matrix& x, const Vector& y,
                                 const Vector& penalty, const Vector& theta);
double linreg_laplace_objective(const Matrix& x, const Vector& y,
                                const Vector& penalty, const Vector& theta);
/// Negative log-likelihood sum_i [log(1 + e^{z_i}) - y_i z_i], z = X theta.
double logistic_nll(const Matrix& x, const Vector& y, const Vector& theta);
Vector logistic_nll_gradient(const Matrix& x, const Vector& y, const Vector& theta);
/// NLL + 1/2 sum_j penalty_j theta_j^2 (minimization form).
double logreg_gaussian_objective(const Matrix& x, const Vector& y,
                                 const Vector& penalty, const Vector& theta);
Vector logreg_gaussian_gradient(const Matrix& x, const Vector& y,
                                const Vector& penalty, const Vector& theta);
/// NLL + sum_j penalty_j |theta_j|.
double logreg_laplace_objective(const Matrix& x, const Vector& y,
                                const Vector& penalty, const Vector& theta);

/// X theta + b for linear models, sigma(X theta + b) for logistic ones.
Vector predict(const FittedModel& model, const Matrix& x_new);

double mse(const Vector& y_true, const Vector& y_pred);

}  // namespace dmlreg
