#include "dmlreg/expert_sim.hpp"

#include <algorithm>
#include <string>

#include "dmlreg/error.hpp"

namespace dmlreg {

void GenConfig::validate() const {
  if (n < 1 || relevant_count < 0 || relevant_count > n) {
    fail(ErrorCode::InvalidConfig, "need 0 <= relevant_count <= n and n >= 1");
  }
  if (m < 1 || m_val < 1) fail(ErrorCode::InvalidConfig, "m and m_val must be >= 1");
  if (!(coef_lo < coef_hi)) fail(ErrorCode::InvalidConfig, "coefficient range must be ordered");
  if (!(noise_sd >= 0.0)) fail(ErrorCode::InvalidConfig, "noise_sd must be >= 0");
}

const char* to_string(KnowledgeType::Kind kind) {
  switch (kind) {
    case KnowledgeType::Kind::Perfect: return "perfect";
    case KnowledgeType::Kind::Noisy: return "noisy";
    case KnowledgeType::Kind::Incorrect: return "incorrect";
  }
  return "unknown";
}

Vector sample_theta(const GenConfig& config, Rng& rng) {
  config.validate();
  Vector theta = Vector::Zero(config.n);
  theta.head(config.relevant_count) =
      sample_uniform(rng, config.coef_lo, config.coef_hi, config.relevant_count);
  return theta;
}

SplitDataset generate_dataset(const Vector& theta, const GenConfig& config, Rng& rng) {
  config.validate();
  if (theta.size() != config.n) {
    fail(ErrorCode::DimensionMismatch, "theta has " + std::to_string(theta.size()) +
                                           " entries, config.n is " + std::to_string(config.n));
  }
  auto draw = [&](Eigen::Index rows) {
    Dataset d;
    d.x = sample_uniform_matrix(rng, 0.0, 1.0, rows, config.n);
    d.y = d.x * theta + sample_gaussian(rng, 0.0, config.noise_sd, rows);
    d.theta_true = theta;
    d.noise_sd = config.noise_sd;
    return d;
  };
  SplitDataset out;
  out.train = draw(config.m);
  out.validation = draw(config.m_val);
  return out;
}

DiagonalMetric make_true_metric(const KnowledgeType& kind, const Vector& theta, Rng& rng) {
  switch (kind.kind) {
    case KnowledgeType::Kind::Perfect:
      return DiagonalMetric(theta.cwiseAbs());
    case KnowledgeType::Kind::Noisy:
      return DiagonalMetric(
          (theta + sample_gaussian(rng, 0.0, kind.noise_sd, theta.size())).cwiseAbs());
    case KnowledgeType::Kind::Incorrect:
      return DiagonalMetric(sample_uniform(rng, kind.lo, kind.hi, theta.size()).cwiseAbs());
  }
  fail(ErrorCode::InvalidConfig, "unknown knowledge type");
}

PairSets generate_pair_sets(const Matrix& x, const DiagonalMetric& true_metric,
                            std::size_t p) {
  std::vector<PairDistance> all = pairwise_distances(x, true_metric);
  if (p < 1) fail(ErrorCode::InvalidHyperparameter, "p must be >= 1");
  if (2 * p > all.size()) {
    fail(ErrorCode::TooManyPairs, "2p = " + std::to_string(2 * p) + " exceeds " +
                                      std::to_string(all.size()) + " available pairs");
  }
  // pairwise_distances is in lexicographic order already, so a stable sort
  // by distance realizes the (distance, i, j) ranking.
  std::stable_sort(all.begin(), all.end(), [](const PairDistance& a, const PairDistance& b) {
    return a.distance < b.distance;
  });
  PairSets sets;
  sets.similar.reserve(p);
  sets.dissimilar.reserve(p);
  for (std::size_t k = 0; k < p; ++k) {
    sets.similar.push_back(all[k].pair);
    sets.dissimilar.push_back(all[all.size() - 1 - k].pair);
  }
  return sets;
}

}  // namespace dmlreg
