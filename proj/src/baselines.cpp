#include "dmlreg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dmlreg/error.hpp"

namespace dmlreg {

namespace {

void check_xy(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) {
    fail(ErrorCode::DimensionMismatch, "X has " + std::to_string(x.rows()) +
                                           " rows, y has " + std::to_string(y.size()));
  }
}

Matrix take_rows(const Matrix& x, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
  return out;
}

Vector take(const Vector& y, const std::vector<Eigen::Index>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = y[rows[r]];
  return out;
}

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

std::vector<Split> make_splits(const std::vector<int>& fold_of, int folds) {
  std::vector<Split> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    for (int f = 0; f < folds; ++f) {
      auto& s = out[static_cast<std::size_t>(f)];
      (fold_of[i] == f ? s.test : s.train).push_back(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

// Lowest mean MSE wins; near-ties go to the later (larger) grid value.
double pick_best(const std::vector<CvPoint>& table) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const double a = table[i].mean_mse;
    const double b = table[best].mean_mse;
    const bool tie = std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
    if (a < b || (tie && table[i].value > table[best].value)) best = i;
  }
  return table[best].value;
}

}  // namespace

KnnModel fit_knn(const Matrix& x, const Vector& y, int k) {
  check_xy(x, y);
  if (k < 1 || k > x.rows()) {
    fail(ErrorCode::InvalidHyperparameter,
         "knn: k must be in [1, " + std::to_string(x.rows()) + "]");
  }
  return KnnModel{x, y, k};
}

Vector predict(const KnnModel& model, const Matrix& x_new) {
  if (x_new.cols() != model.x.cols()) {
    fail(ErrorCode::DimensionMismatch, "knn: feature count mismatch");
  }
  const Eigen::Index m = model.x.rows();
  const auto k = static_cast<std::size_t>(model.k);
  Vector out(x_new.rows());
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(m));
  for (Eigen::Index q = 0; q < x_new.rows(); ++q) {
    for (Eigen::Index i = 0; i < m; ++i) {
      dist[static_cast<std::size_t>(i)] = {(model.x.row(i) - x_new.row(q)).squaredNorm(), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double sum = 0.0;
    for (std::size_t r = 0; r < k; ++r) sum += model.y[dist[r].second];
    out[q] = sum / static_cast<double>(k);
  }
  return out;
}

FittedModel fit_ols(const Matrix& x, const Vector& y) {
  check_xy(x, y);
  return fit_linreg_gaussian(
      x, y, DiagonalMetric(Vector::Constant(x.cols(), std::numeric_limits<double>::infinity())));
}

FittedModel fit_ridge(const Matrix& x, const Vector& y, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidHyperparameter, "ridge: lambda must be > 0");
  }
  check_xy(x, y);
  return fit_linreg_gaussian(x, y, DiagonalMetric(Vector::Constant(x.cols(), 1.0 / lambda)));
}

FittedModel fit_lasso(const Matrix& x, const Vector& y, double lambda, double tolerance,
                      int max_sweeps) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidHyperparameter, "lasso: lambda must be > 0");
  }
  check_xy(x, y);
  const Eigen::Index n = x.cols();
  const Vector col_sq = x.colwise().squaredNorm().transpose();
  Vector theta = Vector::Zero(n);
  Vector resid = y;
  FitDiagnostics diag;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    diag.iterations = sweep + 1;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (col_sq[j] == 0.0) continue;
      // Minimizer of ||r_j - x_j t||^2 + lambda |t|, r_j the partial residual.
      const double rho = x.col(j).dot(resid) + col_sq[j] * theta[j];
      const double shrunk = std::copysign(std::max(std::abs(rho) - 0.5 * lambda, 0.0), rho);
      const double next = shrunk / col_sq[j];
      const double delta = next - theta[j];
      if (delta != 0.0) {
        resid -= delta * x.col(j);
        theta[j] = next;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change <= tolerance) {
      diag.converged = true;
      break;
    }
  }
  FittedModel model;
  model.coefficients = theta;
  model.spec = {Likelihood::GaussianLinear, Prior::Laplace,
                DiagonalMetric(Vector::Constant(n, 1.0 / lambda))};
  diag.objective = resid.squaredNorm() + lambda * theta.lpNorm<1>();
  model.diagnostics = diag;
  return model;
}

BaselineModel fit_baseline(const BaselineKind& kind, const Matrix& x, const Vector& y) {
  switch (kind.kind) {
    case BaselineKind::Kind::Ols: return fit_ols(x, y);
    case BaselineKind::Kind::Ridge: return fit_ridge(x, y, kind.lambda);
    case BaselineKind::Kind::Lasso: return fit_lasso(x, y, kind.lambda);
    case BaselineKind::Kind::Knn: return fit_knn(x, y, kind.k);
  }
  fail(ErrorCode::InvalidConfig, "unknown baseline kind");
}

Vector predict(const BaselineModel& model, const Matrix& x_new) {
  return std::visit([&](const auto& m) { return predict(m, x_new); }, model);
}

std::vector<double> default_lambda_grid() { return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}; }

std::vector<int> assign_folds(Eigen::Index rows, int folds, Rng& rng) {
  if (folds < 2) fail(ErrorCode::InvalidHyperparameter, "need at least 2 folds");
  if (rows < folds) {
    fail(ErrorCode::TooFewRows, std::to_string(rows) + " rows for " +
                                    std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> perm(static_cast<std::size_t>(rows));
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
  }
  std::vector<int> fold_of(perm.size());
  for (std::size_t pos = 0; pos < perm.size(); ++pos) {
    fold_of[perm[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

CvResult cross_validate(PenaltyKind kind, const Matrix& x, const Vector& y,
                        const std::vector<double>& lambda_grid, int folds, Rng& rng) {
  check_xy(x, y);
  if (lambda_grid.empty()) fail(ErrorCode::InvalidHyperparameter, "empty lambda grid");
  const auto splits = make_splits(assign_folds(x.rows(), folds, rng), folds);
  CvResult result;
  for (double lambda : lambda_grid) {
    CvPoint point{lambda, 0.0, {}};
    for (const auto& s : splits) {
      const Matrix xtr = take_rows(x, s.train);
      const Vector ytr = take(y, s.train);
      const FittedModel model =
          kind == PenaltyKind::Ridge ? fit_ridge(xtr, ytr, lambda) : fit_lasso(xtr, ytr, lambda);
      point.fold_mse.push_back(mse(take(y, s.test), predict(model, take_rows(x, s.test))));
    }
    point.mean_mse = std::accumulate(point.fold_mse.begin(), point.fold_mse.end(), 0.0) /
                     static_cast<double>(point.fold_mse.size());
    result.table.push_back(std::move(point));
  }
  result.best = pick_best(result.table);
  return result;
}

CvResult cross_validate_knn(const Matrix& x, const Vector& y, const std::vector<int>& k_grid,
                            int folds, Rng& rng) {
  check_xy(x, y);
  const auto splits = make_splits(assign_folds(x.rows(), folds, rng), folds);
  std::size_t smallest_train = static_cast<std::size_t>(x.rows());
  for (const auto& s : splits) smallest_train = std::min(smallest_train, s.train.size());
  CvResult result;
  for (int k : k_grid) {
    if (k < 1 || static_cast<std::size_t>(k) > smallest_train) continue;
    CvPoint point{static_cast<double>(k), 0.0, {}};
    for (const auto& s : splits) {
      const KnnModel model = fit_knn(take_rows(x, s.train), take(y, s.train), k);
      point.fold_mse.push_back(mse(take(y, s.test), predict(model, take_rows(x, s.test))));
    }
    point.mean_mse = std::accumulate(point.fold_mse.begin(), point.fold_mse.end(), 0.0) /
                     static_cast<double>(point.fold_mse.size());
    result.table.push_back(std::move(point));
  }
  if (result.table.empty()) fail(ErrorCode::InvalidHyperparameter, "no usable k in grid");
  result.best = pick_best(result.table);
  return result;
}

}  // namespace dmlreg
