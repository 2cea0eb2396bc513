#pragma once

#include <optional>
#include <string>

#include "dmlreg/metric_learning.hpp"
#include "dmlreg/numerics.hpp"

namespace dmlreg {

struct Dataset {
  Matrix x;
  Vector y;
  std::optional<Vector> theta_true;
  double noise_sd = 1.0;
};

struct GenConfig {
  Eigen::Index n = 100;
  Eigen::Index m = 100;
  Eigen::Index m_val = 900;
  Eigen::Index relevant_count = 10;
  double coef_lo = -10.0;
  double coef_hi = 10.0;
  double noise_sd = 1.0;

  /// Throws InvalidConfig unless relevant_count <= n, m >= 1, m_val >= 1,
  /// coef_lo < coef_hi and noise_sd >= 0.
  void validate() const;
};

/// Simulated expert quality. `noise_sd` applies to Noisy, [lo, hi) to Incorrect.
struct KnowledgeType {
  enum class Kind { Perfect, Noisy, Incorrect };
  Kind kind = Kind::Perfect;
  double noise_sd = 0.5;
  double lo = -5.0;
  double hi = 5.0;

  static KnowledgeType perfect() { return {Kind::Perfect}; }
  static KnowledgeType noisy(double sd = 0.5) { return {Kind::Noisy, sd}; }
  static KnowledgeType incorrect(double lo = -5.0, double hi = 5.0) {
    return {Kind::Incorrect, 0.5, lo, hi};
  }
};

const char* to_string(KnowledgeType::Kind kind);

/// First relevant_count entries Unif[coef_lo, coef_hi); the rest exactly 0.
Vector sample_theta(const GenConfig& config, Rng& rng);

struct SplitDataset {
  Dataset train;
  Dataset validation;
};

/// X ~ Unif(0,1), y = X theta + eps with eps ~ N(0, noise_sd^2), for the
/// training rows and then the validation rows.
SplitDataset generate_dataset(const Vector& theta, const GenConfig& config, Rng& rng);

/// Perfect: |theta_i|. Noisy: |theta_i + e_i|, e_i ~ N(0, sd^2).
/// Incorrect: |a_i|, a_i ~ Unif[lo, hi).
DiagonalMetric make_true_metric(const KnowledgeType& kind, const Vector& theta, Rng& rng);

/// Labels the p closest row pairs under `true_metric` similar and the p
/// farthest dissimilar. Pairs are ranked by (distance, i, j) ascending; S is
/// the first p of that order and D the last p, listed farthest first.
/// Throws TooManyPairs when 2p exceeds m(m-1)/2.
PairSets generate_pair_sets(const Matrix& x, const DiagonalMetric& true_metric,
                            std::size_t p);

}  // namespace dmlreg
