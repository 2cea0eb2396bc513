#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmlreg/glm.hpp"
#include "dmlreg/metric_learning.hpp"

namespace dmlreg {

enum class ExperimentKind { Fig1, Fig3, Fig4, Fig5 };

/// Knowledge arm: a simulated expert or the plain Euclidean metric A = I.
enum class Arm { Perfect, Noisy, Incorrect, Euclidean };

const char* to_string(ExperimentKind kind);
const char* to_string(Arm arm);
ExperimentKind parse_experiment(const std::string& s);
Arm parse_arm(const std::string& s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Fig3;
  std::vector<Eigen::Index> n_values{10, 25, 50, 75, 100};
  Eigen::Index m = 100;
  Eigen::Index m_val = 900;
  std::size_t p = 300;
  std::vector<std::size_t> p_values{25, 50, 100, 200, 300, 500, 700};
  int replicates = 100;
  std::uint64_t base_seed = 0;
  std::vector<Arm> arms{Arm::Perfect, Arm::Noisy, Arm::Incorrect, Arm::Euclidean};

  Eigen::Index relevant_count = 10;
  double noise_sd = 1.0;
  double knowledge_noise_sd = 0.5;
  int cv_folds = 5;
  std::vector<double> lambda_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  std::vector<int> knn_grid{1, 3, 5, 10, 20};

  /// Metric learning stops after this iteration budget.
  MetricLearnOptions metric_options{1000, 1e-2, 1e-6};
  FitOptions fit_options;

  /// Draw a fresh theta per replicate instead of one per n.
  bool resample_theta = false;
  /// Also fit with the (unit-mean) true metric, metric_source = "true".
  bool true_metric_arms = false;
  /// Threshold y at its training median and fit both logistic models.
  bool logistic = false;
  /// Fill wall_ms (0 otherwise).
  bool record_timing = false;

  /// Defaults per experiment: fig4 and fig5 use n = {100}; fig4 one replicate.
  static ExperimentConfig defaults(ExperimentKind kind);

  /// Throws InvalidConfig / TooManyPairs.
  void validate() const;
};

struct ResultRow {
  std::string experiment;
  int replicate = 0;
  Eigen::Index n = 0;
  std::size_t p = 0;
  std::string model;
  std::string knowledge;
  std::string metric_source;
  double val_mse = 0.0;  // NaN marks a failed fit
  double wall_ms = 0.0;
};

struct CoefficientRow {
  int replicate = 0;
  Eigen::Index n = 0;
  Eigen::Index feature = 0;  // 1-based
  bool relevant = false;
  double theta_true = 0.0;
  double theta_dmlreg = 0.0;
  double theta_lasso = 0.0;
};

struct LogisticRow {
  std::string experiment;
  int replicate = 0;
  Eigen::Index n = 0;
  std::string model;
  std::string knowledge;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double val_accuracy = 0.0;
};

struct SummaryRow {
  std::string experiment;
  Eigen::Index n = 0;
  std::size_t p = 0;
  std::string model;
  std::string knowledge;
  std::string metric_source;
  double mean_val_mse = 0.0;
  int count = 0;
  int failed = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<CoefficientRow> coefficients;
  std::vector<LogisticRow> logistic;
};

ResultTable run_fig1(const ExperimentConfig& config);
ResultTable run_fig3(const ExperimentConfig& config);
ResultTable run_fig4(const ExperimentConfig& config);
ResultTable run_fig5(const ExperimentConfig& config);
ResultTable run_experiment(const ExperimentConfig& config);

/// Sorts by (experiment, knowledge, n, p, replicate, model, metric_source).
void sort_rows(std::vector<ResultRow>& rows);

/// Mean validation MSE per (experiment, n, p, model, knowledge,
/// metric_source); failed rows are counted but excluded from the mean.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

}  // namespace dmlreg
