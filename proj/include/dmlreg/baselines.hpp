#pragma once

#include <variant>
#include <vector>

#include "dmlreg/glm.hpp"

namespace dmlreg {

/// k-nearest-neighbor regressor: predicts the mean response of the k
/// Euclidean-nearest training rows. Distance ties go to the lower row index.
struct KnnModel {
  Matrix x;
  Vector y;
  int k = 1;
};

KnnModel fit_knn(const Matrix& x, const Vector& y, int k);
Vector predict(const KnnModel& model, const Matrix& x_new);

/// Ordinary least squares: the Gaussian-prior fit with infinite prior scales.
FittedModel fit_ols(const Matrix& x, const Vector& y);

/// Ridge with penalty lambda ||theta||^2: the Gaussian-prior fit with every
/// metric weight equal to 1 / lambda.
FittedModel fit_ridge(const Matrix& x, const Vector& y, double lambda);

/// Lasso ||y - X theta||^2 + lambda ||theta||_1 by cyclic coordinate descent,
/// stopping when no coordinate moves more than `tolerance`.
FittedModel fit_lasso(const Matrix& x, const Vector& y, double lambda,
                      double tolerance = 1e-8, int max_sweeps = 100000);

struct BaselineKind {
  enum class Kind { Ols, Ridge, Lasso, Knn };
  Kind kind = Kind::Ols;
  double lambda = 1.0;
  int k = 5;

  static BaselineKind ols() { return {Kind::Ols, 0.0, 0}; }
  static BaselineKind ridge(double lambda) { return {Kind::Ridge, lambda, 0}; }
  static BaselineKind lasso(double lambda) { return {Kind::Lasso, lambda, 0}; }
  static BaselineKind knn(int k) { return {Kind::Knn, 0.0, k}; }
};

using BaselineModel = std::variant<FittedModel, KnnModel>;

BaselineModel fit_baseline(const BaselineKind& kind, const Matrix& x, const Vector& y);
Vector predict(const BaselineModel& model, const Matrix& x_new);

/// {1e-4, 1e-3, ..., 1e2}.
std::vector<double> default_lambda_grid();

struct CvPoint {
  double value = 0.0;  // lambda, or k for kNN
  double mean_mse = 0.0;
  std::vector<double> fold_mse;
};

struct CvResult {
  double best = 0.0;
  std::vector<CvPoint> table;
};

/// Fold id per row: a seeded Fisher-Yates permutation dealt round-robin
/// into `folds` groups. Throws TooFewRows if rows < folds.
std::vector<int> assign_folds(Eigen::Index rows, int folds, Rng& rng);

enum class PenaltyKind { Ridge, Lasso };

/// K-fold selection of lambda by mean held-out MSE. Ties (within 1e-12
/// relative) go to the larger lambda.
CvResult cross_validate(PenaltyKind kind, const Matrix& x, const Vector& y,
                        const std::vector<double>& lambda_grid, int folds, Rng& rng);

/// K-fold selection of k for kNN. Values of k larger than the smallest
/// training fold are skipped; ties go to the larger k.
CvResult cross_validate_knn(const Matrix& x, const Vector& y,
                            const std::vector<int>& k_grid, int folds, Rng& rng);

}  // namespace dmlreg
