#pragma once

#include <cstddef>
#include <vector>

#include "dmlreg/numerics.hpp"

namespace dmlreg {

/// Diagonal Mahalanobis metric A = diag(weights). Weights are nonnegative;
/// a zero weight means the feature is ignored by the distance.
class DiagonalMetric {
 public:
  DiagonalMetric() = default;
  explicit DiagonalMetric(Vector weights);

  static DiagonalMetric identity(Eigen::Index n);

  const Vector& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return weights_.size(); }

  /// Copy with every weight multiplied by `factor` > 0.
  DiagonalMetric scaled(double factor) const;

  /// Copy rescaled so the mean weight is one, i.e. trace(A) = trace(I).
  /// An all-zero metric is returned unchanged.
  DiagonalMetric unit_mean() const;

 private:
  Vector weights_;
};

struct IndexPair {
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const IndexPair&, const IndexPair&) = default;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Expert supervision: pairs of row indices labeled similar (S) or
/// dissimilar (D). Pairs are stored with i < j.
struct PairSets {
  std::vector<IndexPair> similar;
  std::vector<IndexPair> dissimilar;
};

/// Checks i < j, indices below `rows`, no duplicates within a list and no
/// pair in both lists. Throws DimensionMismatch or InvalidConfig.
void validate_pairs(const PairSets& pairs, std::size_t rows);

struct PairDistance {
  IndexPair pair;
  double distance = 0.0;
};

double mahalanobis_distance(const Eigen::Ref<const Vector>& a,
                            const Eigen::Ref<const Vector>& b,
                            const DiagonalMetric& metric);

/// Distances for all m(m-1)/2 row pairs of `x`, in lexicographic pair order.
std::vector<PairDistance> pairwise_distances(const Matrix& x,
                                             const DiagonalMetric& metric);

struct MetricLearnOptions {
  int max_iterations = 10000;
  /// Gradient step as a fraction of the current mean weight per unit of
  /// mean gradient; halved whenever a step fails to reduce the objective.
  double step_size = 1e-2;
  /// Stop once the relative objective decrease of an iteration drops below this.
  double tolerance = 1e-6;
};

struct MetricLearnResult {
  DiagonalMetric metric;
  /// Objective after the feasible start and after every accepted step.
  std::vector<double> objective_history;
  int iterations = 0;
  bool converged = false;
  /// Sum of dissimilar-pair distances at the returned point.
  double dissimilar_sum = 0.0;
};

/// Sum of squared distances over the similar pairs.
double similar_objective(const Matrix& x, const PairSets& pairs,
                         const DiagonalMetric& metric);

/// Sum of (unsquared) distances over the dissimilar pairs.
double dissimilar_sum(const Matrix& x, const PairSets& pairs,
                      const DiagonalMetric& metric);

/// Solves
///
///   minimize    sum_{(i,j) in S} d_A(x_i, x_j)^2
///   subject to  sum_{(i,j) in D} d_A(x_i, x_j) >= 1,  A = diag(w),  w >= 0
///
/// by projected gradient descent. The objective is linear in w with a
/// constant gradient c (the summed squared differences over S). Each step
/// moves w against c, clips at zero and, when the constraint is violated,
/// restores it exactly through w <- w / s^2 where s is the dissimilar sum
/// (distances scale as sqrt(t) under w <- t w). Iterates are feasible and the
/// recorded objective never increases.
///
/// Throws EmptyPairSet, DegeneratePairs (every dissimilar pair coincides),
/// DimensionMismatch or InvalidHyperparameter.
MetricLearnResult learn_metric_detailed(const Matrix& x, const PairSets& pairs,
                                        const MetricLearnOptions& opts = {});

DiagonalMetric learn_metric(const Matrix& x, const PairSets& pairs,
                            const MetricLearnOptions& opts = {});

}  // namespace dmlreg
