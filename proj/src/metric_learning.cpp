#include "dmlreg/metric_learning.hpp"

#include <cmath>
#include <set>
#include <string>

#include "dmlreg/error.hpp"

namespace dmlreg {

DiagonalMetric::DiagonalMetric(Vector weights) : weights_(std::move(weights)) {
  for (Eigen::Index k = 0; k < weights_.size(); ++k) {
    const double w = weights_[k];
    // +inf is allowed: an unbounded prior variance.
    if (std::isnan(w) || w < 0.0) {
      fail(ErrorCode::InvalidConfig,
           "metric weight " + std::to_string(k) + " must be >= 0");
    }
  }
}

DiagonalMetric DiagonalMetric::identity(Eigen::Index n) {
  return DiagonalMetric(Vector::Ones(n));
}

DiagonalMetric DiagonalMetric::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    fail(ErrorCode::InvalidHyperparameter, "metric scale factor must be > 0");
  }
  return DiagonalMetric(weights_ * factor);
}

DiagonalMetric DiagonalMetric::unit_mean() const {
  if (weights_.size() == 0) return *this;
  const double mean = weights_.mean();
  if (!(mean > 0.0) || !std::isfinite(mean)) return *this;
  return DiagonalMetric(weights_ / mean);
}

void validate_pairs(const PairSets& pairs, std::size_t rows) {
  std::set<IndexPair> seen_similar;
  for (const auto& p : pairs.similar) {
    if (p.i >= p.j) {
      fail(ErrorCode::InvalidConfig, "similar pair must satisfy i < j");
    }
    if (p.j >= rows) {
      fail(ErrorCode::DimensionMismatch, "similar pair index out of range");
    }
    if (!seen_similar.insert(p).second) {
      fail(ErrorCode::InvalidConfig, "duplicate similar pair");
    }
  }
  std::set<IndexPair> seen_dissimilar;
  for (const auto& p : pairs.dissimilar) {
    if (p.i >= p.j) {
      fail(ErrorCode::InvalidConfig, "dissimilar pair must satisfy i < j");
    }
    if (p.j >= rows) {
      fail(ErrorCode::DimensionMismatch, "dissimilar pair index out of range");
    }
    if (!seen_dissimilar.insert(p).second) {
      fail(ErrorCode::InvalidConfig, "duplicate dissimilar pair");
    }
    if (seen_similar.count(p) != 0) {
      fail(ErrorCode::InvalidConfig, "pair is labeled both similar and dissimilar");
    }
  }
}

double mahalanobis_distance(const Eigen::Ref<const Vector>& a,
                            const Eigen::Ref<const Vector>& b,
                            const DiagonalMetric& metric) {
  if (a.size() != metric.size() || b.size() != metric.size()) {
    fail(ErrorCode::DimensionMismatch,
         "mahalanobis_distance: vectors of length " + std::to_string(a.size()) +
             " and " + std::to_string(b.size()) + ", metric of length " +
             std::to_string(metric.size()));
  }
  return std::sqrt((metric.weights().array() * (a - b).array().square()).sum());
}

std::vector<PairDistance> pairwise_distances(const Matrix& x,
                                             const DiagonalMetric& metric) {
  if (x.cols() != metric.size()) {
    fail(ErrorCode::DimensionMismatch,
         "pairwise_distances: " + std::to_string(x.cols()) +
             " features, metric of length " + std::to_string(metric.size()));
  }
  const auto m = static_cast<std::size_t>(x.rows());
  std::vector<PairDistance> out;
  out.reserve(m * (m > 0 ? m - 1 : 0) / 2);
  const auto& w = metric.weights();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d2 =
          (w.transpose().array() *
           (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).array().square())
              .sum();
      out.push_back({{i, j}, std::sqrt(d2)});
    }
  }
  return out;
}

namespace {

// Row k holds the squared per-feature differences of pair k.
Matrix squared_differences(const Matrix& x, const std::vector<IndexPair>& list) {
  Matrix out(static_cast<Eigen::Index>(list.size()), x.cols());
  for (std::size_t k = 0; k < list.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) =
        (x.row(static_cast<Eigen::Index>(list[k].i)) -
         x.row(static_cast<Eigen::Index>(list[k].j)))
            .array()
            .square()
            .matrix();
  }
  return out;
}

double distance_sum(const Matrix& sq_diff, const Vector& w) {
  return (sq_diff * w).array().max(0.0).sqrt().sum();
}

void check_features(const Matrix& x, const DiagonalMetric& metric) {
  if (x.cols() != metric.size()) {
    fail(ErrorCode::DimensionMismatch, "metric length does not match feature count");
  }
}

}  // namespace

double similar_objective(const Matrix& x, const PairSets& pairs,
                         const DiagonalMetric& metric) {
  check_features(x, metric);
  return (squared_differences(x, pairs.similar) * metric.weights()).sum();
}

double dissimilar_sum(const Matrix& x, const PairSets& pairs,
                      const DiagonalMetric& metric) {
  check_features(x, metric);
  return distance_sum(squared_differences(x, pairs.dissimilar), metric.weights());
}

MetricLearnResult learn_metric_detailed(const Matrix& x, const PairSets& pairs,
                                        const MetricLearnOptions& opts) {
  if (opts.max_iterations < 1 || !(opts.step_size > 0.0) || !(opts.tolerance > 0.0)) {
    fail(ErrorCode::InvalidHyperparameter,
         "metric learning options must all be positive");
  }
  if (pairs.similar.empty() || pairs.dissimilar.empty()) {
    fail(ErrorCode::EmptyPairSet, "both similar and dissimilar sets must be nonempty");
  }
  validate_pairs(pairs, static_cast<std::size_t>(x.rows()));
  const Eigen::Index n = x.cols();
  if (n == 0) fail(ErrorCode::DimensionMismatch, "no features");

  const Vector grad = squared_differences(x, pairs.similar).colwise().sum().transpose();
  const Matrix dis = squared_differences(x, pairs.dissimilar);
  if (dis.maxCoeff() <= 0.0) {
    fail(ErrorCode::DegeneratePairs,
         "every dissimilar pair has zero feature difference");
  }

  MetricLearnResult result;
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  {
    const double s = distance_sum(dis, w);
    w /= s * s;
  }
  double objective = grad.dot(w);
  result.objective_history.push_back(objective);

  const double grad_mean = grad.mean();
  if (grad_mean <= 0.0 || objective <= 0.0) {
    // Every similar pair coincides: any feasible point is optimal.
    result.converged = true;
  }

  double step = opts.step_size;
  const double min_step = opts.step_size * 1e-12;
  while (!result.converged && result.iterations < opts.max_iterations) {
    Vector trial;
    double trial_objective = 0.0;
    bool accepted = false;
    while (step >= min_step) {
      const double scale = step * w.mean() / grad_mean;
      trial = (w - scale * grad).cwiseMax(0.0);
      const double s = distance_sum(dis, trial);
      if (s > 0.0) {
        if (s < 1.0) trial /= s * s;
        trial_objective = grad.dot(trial);
        if (trial_objective <= objective) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent step remains at any admissible size: stationary.
      result.converged = true;
      break;
    }
    ++result.iterations;
    const double decrease = (objective - trial_objective) / objective;
    w = std::move(trial);
    objective = trial_objective;
    result.objective_history.push_back(objective);
    if (decrease < opts.tolerance || objective <= 0.0) result.converged = true;
  }

  result.metric = DiagonalMetric(std::move(w));
  result.dissimilar_sum = distance_sum(dis, result.metric.weights());
  return result;
}

DiagonalMetric learn_metric(const Matrix& x, const PairSets& pairs,
                            const MetricLearnOptions& opts) {
  return learn_metric_detailed(x, pairs, opts).metric;
}

}  // namespace dmlreg
