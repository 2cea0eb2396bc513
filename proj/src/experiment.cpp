#include "dmlreg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <tuple>

#include "dmlreg/baselines.hpp"
#include "dmlreg/error.hpp"
#include "dmlreg/expert_sim.hpp"

namespace dmlreg {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Fig1: return "fig1";
    case ExperimentKind::Fig3: return "fig3";
    case ExperimentKind::Fig4: return "fig4";
    case ExperimentKind::Fig5: return "fig5";
  }
  return "unknown";
}

const char* to_string(Arm arm) {
  switch (arm) {
    case Arm::Perfect: return "perfect";
    case Arm::Noisy: return "noisy";
    case Arm::Incorrect: return "incorrect";
    case Arm::Euclidean: return "euclidean";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& s) {
  for (auto k : {ExperimentKind::Fig1, ExperimentKind::Fig3, ExperimentKind::Fig4,
                 ExperimentKind::Fig5}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorCode::InvalidConfig, "unknown experiment '" + s + "'");
}

Arm parse_arm(const std::string& s) {
  for (auto a : {Arm::Perfect, Arm::Noisy, Arm::Incorrect, Arm::Euclidean}) {
    if (s == to_string(a)) return a;
  }
  fail(ErrorCode::InvalidConfig, "unknown knowledge arm '" + s + "'");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  if (kind == ExperimentKind::Fig4 || kind == ExperimentKind::Fig5) {
    c.n_values = {100};
    c.replicates = 1;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) fail(ErrorCode::InvalidConfig, "n_values must be nonempty");
  if (replicates < 1) fail(ErrorCode::InvalidConfig, "replicates must be >= 1");
  if (m < 2 || m_val < 1) fail(ErrorCode::InvalidConfig, "need m >= 2 and m_val >= 1");
  for (auto n : n_values) {
    if (n < 1 || n < relevant_count) {
      fail(ErrorCode::InvalidConfig,
           "every n must be >= relevant_count (" + std::to_string(relevant_count) + ")");
    }
  }
  if (!(noise_sd >= 0.0) || !(knowledge_noise_sd >= 0.0)) {
    fail(ErrorCode::InvalidConfig, "noise scales must be >= 0");
  }
  if (experiment == ExperimentKind::Fig1) {
    if (cv_folds < 2 || cv_folds > m) fail(ErrorCode::InvalidConfig, "cv_folds must be in [2, m]");
    if (lambda_grid.empty() || knn_grid.empty()) {
      fail(ErrorCode::InvalidConfig, "lambda and k grids must be nonempty");
    }
    for (double l : lambda_grid) {
      if (!(l > 0.0)) fail(ErrorCode::InvalidConfig, "lambda grid values must be > 0");
    }
  }
  if ((experiment == ExperimentKind::Fig3 || experiment == ExperimentKind::Fig4) && arms.empty()) {
    fail(ErrorCode::InvalidConfig, "at least one knowledge arm is required");
  }
  const auto pair_count = static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2;
  auto check_p = [&](std::size_t pv) {
    if (pv < 1) fail(ErrorCode::InvalidConfig, "p must be >= 1");
    if (2 * pv > pair_count) {
      fail(ErrorCode::TooManyPairs, "p = " + std::to_string(pv) + " needs " +
                                        std::to_string(2 * pv) + " pairs, m = " +
                                        std::to_string(m) + " gives " +
                                        std::to_string(pair_count));
    }
  };
  if (experiment == ExperimentKind::Fig3 || experiment == ExperimentKind::Fig5) check_p(p);
  if (experiment == ExperimentKind::Fig4) {
    if (p_values.empty()) fail(ErrorCode::InvalidConfig, "p_values must be nonempty");
    for (auto pv : p_values) check_p(pv);
  }
}

namespace {

namespace tag {
constexpr std::uint64_t theta = 1;
constexpr std::uint64_t data = 2;
constexpr std::uint64_t cv = 3;
constexpr std::uint64_t arm = 4;
}  // namespace tag

Rng stream(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t seed = base;
  for (auto t : path) seed = derive_seed(seed, t);
  return Rng(seed);
}

GenConfig gen_config(const ExperimentConfig& c, Eigen::Index n) {
  GenConfig g;
  g.n = n;
  g.m = c.m;
  g.m_val = c.m_val;
  g.relevant_count = c.relevant_count;
  g.noise_sd = c.noise_sd;
  return g;
}

struct Replicate {
  Vector theta;
  SplitDataset data;
};

// Streams depend only on (base_seed, n, replicate[, arm]) so rows are
// unchanged when other replicates, sweep points or arms are added.
Replicate make_replicate(const ExperimentConfig& c, Eigen::Index n, int r) {
  const GenConfig g = gen_config(c, n);
  const auto un = static_cast<std::uint64_t>(n);
  const auto ur = static_cast<std::uint64_t>(r);
  Rng theta_rng = c.resample_theta ? stream(c.base_seed, {tag::theta, un, ur})
                                   : stream(c.base_seed, {tag::theta, un});
  Replicate rep;
  rep.theta = sample_theta(g, theta_rng);
  Rng data_rng = stream(c.base_seed, {tag::data, un, ur});
  rep.data = generate_dataset(rep.theta, g, data_rng);
  return rep;
}

Rng arm_stream(const ExperimentConfig& c, Eigen::Index n, int r, Arm arm) {
  return stream(c.base_seed, {tag::arm, static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(arm)});
}

KnowledgeType knowledge_for(const ExperimentConfig& c, Arm arm) {
  switch (arm) {
    case Arm::Perfect: return KnowledgeType::perfect();
    case Arm::Noisy: return KnowledgeType::noisy(c.knowledge_noise_sd);
    case Arm::Incorrect: return KnowledgeType::incorrect();
    case Arm::Euclidean: break;
  }
  fail(ErrorCode::InvalidConfig, "euclidean arm has no simulated expert");
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

struct RowKey {
  const ExperimentConfig* config;
  int replicate;
  Eigen::Index n;
  std::size_t p;
};

// Runs `body` (returning validation MSE) and records a row; a dmlreg::Error
// marks the row failed instead of aborting the experiment.
template <typename Body>
void record(std::vector<ResultRow>& rows, const RowKey& key, const std::string& model,
            const std::string& knowledge, const std::string& source, Body&& body) {
  ResultRow row{to_string(key.config->experiment), key.replicate, key.n, key.p, model,
                knowledge, source, 0.0, 0.0};
  Stopwatch sw(key.config->record_timing);
  try {
    row.val_mse = body();
  } catch (const Error& e) {
    std::cerr << "warning: " << row.experiment << " n=" << key.n << " p=" << key.p
              << " replicate=" << key.replicate << " " << model << "/" << knowledge
              << " failed: " << e.what() << '\n';
    row.val_mse = std::numeric_limits<double>::quiet_NaN();
  }
  row.wall_ms = sw.ms();
  rows.push_back(std::move(row));
}

double val_mse(const FittedModel& model, const Dataset& validation) {
  return mse(validation.y, predict(model, validation.x));
}

DiagonalMetric learned_metric(const ExperimentConfig& c, const Matrix& x,
                              const DiagonalMetric& true_metric, std::size_t p) {
  const PairSets pairs = generate_pair_sets(x, true_metric, p);
  return learn_metric(x, pairs, c.metric_options).unit_mean();
}

double median(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  const Eigen::Index k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

Vector threshold(const Vector& y, double cut) {
  return y.unaryExpr([cut](double v) { return v > cut ? 1.0 : 0.0; });
}

// Labels are y > median(train y); both logistic fitters use `metric` and an
// unpenalized intercept.
void run_logistic(const ExperimentConfig& c, std::vector<LogisticRow>& out, int r,
                  Eigen::Index n, const std::string& knowledge, const DiagonalMetric& metric,
                  const SplitDataset& data) {
  const double cut = median(data.train.y);
  const Vector ytr = threshold(data.train.y, cut);
  const Vector yval = threshold(data.validation.y, cut);
  FitOptions opts = c.fit_options;
  opts.fit_intercept = true;
  for (Prior prior : {Prior::Gaussian, Prior::Laplace}) {
    LogisticRow row{to_string(c.experiment), r, n,
                    prior == Prior::Gaussian ? "logreg_gaussian" : "logreg_laplace",
                    knowledge, 0.0, 0, false, 0.0};
    try {
      const FittedModel model =
          fit({Likelihood::BernoulliLogistic, prior, metric}, data.train.x, ytr, opts);
      const Vector prob = predict(model, data.validation.x);
      int correct = 0;
      for (Eigen::Index i = 0; i < prob.size(); ++i) {
        correct += ((prob[i] > 0.5) == (yval[i] > 0.5)) ? 1 : 0;
      }
      row.objective = model.diagnostics.objective;
      row.iterations = model.diagnostics.iterations;
      row.converged = model.diagnostics.converged;
      row.val_accuracy = static_cast<double>(correct) / static_cast<double>(prob.size());
    } catch (const Error& e) {
      std::cerr << "warning: logistic " << row.model << " failed: " << e.what() << '\n';
      row.objective = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(row));
  }
}

// One knowledge arm of the DMLreg (Laplace prior) pipeline for a dataset.
void run_arm(const ExperimentConfig& c, ResultTable& table, int r, Eigen::Index n,
             std::size_t p, Arm arm, const Replicate& rep, bool with_logistic) {
  const RowKey key{&c, r, n, p};
  const auto& train = rep.data.train;
  const auto& validation = rep.data.validation;
  const std::string knowledge = to_string(arm);

  if (arm == Arm::Euclidean) {
    const DiagonalMetric identity = DiagonalMetric::identity(n);
    record(table.rows, key, "dmlreg_laplace", knowledge, "euclidean", [&] {
      return val_mse(fit_linreg_laplace(train.x, train.y, identity, c.fit_options), validation);
    });
    if (with_logistic) run_logistic(c, table.logistic, r, n, knowledge, identity, rep.data);
    return;
  }

  Rng rng = arm_stream(c, n, r, arm);
  const DiagonalMetric truth = make_true_metric(knowledge_for(c, arm), rep.theta, rng);
  std::optional<DiagonalMetric> learned;
  record(table.rows, key, "dmlreg_laplace", knowledge, "learned", [&] {
    learned = learned_metric(c, train.x, truth, p);
    return val_mse(fit_linreg_laplace(train.x, train.y, *learned, c.fit_options), validation);
  });
  if (c.true_metric_arms) {
    record(table.rows, key, "dmlreg_laplace", knowledge, "true", [&] {
      return val_mse(fit_linreg_laplace(train.x, train.y, truth.unit_mean(), c.fit_options),
                     validation);
    });
  }
  if (with_logistic && learned) {
    run_logistic(c, table.logistic, r, n, knowledge, *learned, rep.data);
  }
}

void finish(ResultTable& table) { sort_rows(table.rows); }

}  // namespace

ResultTable run_fig1(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.experiment = ExperimentKind::Fig1;
  c.validate();
  ResultTable table;
  for (auto n : c.n_values) {
    for (int r = 0; r < c.replicates; ++r) {
      const Replicate rep = make_replicate(c, n, r);
      const auto& train = rep.data.train;
      const auto& validation = rep.data.validation;
      const Rng cv_rng = stream(c.base_seed, {tag::cv, static_cast<std::uint64_t>(n),
                                              static_cast<std::uint64_t>(r)});
      const RowKey key{&c, r, n, 0};

      record(table.rows, key, "ols", "none", "none",
             [&] { return val_mse(fit_ols(train.x, train.y), validation); });
      record(table.rows, key, "knn", "none", "none", [&] {
        Rng rng = cv_rng;
        const auto cv = cross_validate_knn(train.x, train.y, c.knn_grid, c.cv_folds, rng);
        const KnnModel model = fit_knn(train.x, train.y, static_cast<int>(cv.best));
        return mse(validation.y, predict(model, validation.x));
      });
      record(table.rows, key, "ridge_cv", "none", "none", [&] {
        Rng rng = cv_rng;
        const auto cv =
            cross_validate(PenaltyKind::Ridge, train.x, train.y, c.lambda_grid, c.cv_folds, rng);
        return val_mse(fit_ridge(train.x, train.y, cv.best), validation);
      });
      record(table.rows, key, "lasso_cv", "none", "none", [&] {
        Rng rng = cv_rng;
        const auto cv =
            cross_validate(PenaltyKind::Lasso, train.x, train.y, c.lambda_grid, c.cv_folds, rng);
        return val_mse(fit_lasso(train.x, train.y, cv.best), validation);
      });
      if (c.logistic) {
        run_logistic(c, table.logistic, r, n, "euclidean", DiagonalMetric::identity(n), rep.data);
      }
    }
  }
  finish(table);
  return table;
}

ResultTable run_fig3(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.experiment = ExperimentKind::Fig3;
  c.validate();
  ResultTable table;
  for (auto n : c.n_values) {
    for (int r = 0; r < c.replicates; ++r) {
      const Replicate rep = make_replicate(c, n, r);
      for (Arm arm : c.arms) run_arm(c, table, r, n, c.p, arm, rep, c.logistic);
    }
  }
  finish(table);
  return table;
}

ResultTable run_fig4(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.experiment = ExperimentKind::Fig4;
  c.validate();
  ResultTable table;
  for (auto n : c.n_values) {
    for (int r = 0; r < c.replicates; ++r) {
      const Replicate rep = make_replicate(c, n, r);
      for (auto p : c.p_values) {
        for (Arm arm : c.arms) run_arm(c, table, r, n, p, arm, rep, false);
      }
    }
  }
  finish(table);
  return table;
}

ResultTable run_fig5(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.experiment = ExperimentKind::Fig5;
  c.validate();
  ResultTable table;
  for (auto n : c.n_values) {
    for (int r = 0; r < c.replicates; ++r) {
      const Replicate rep = make_replicate(c, n, r);
      const auto& train = rep.data.train;
      const auto& validation = rep.data.validation;
      const RowKey key{&c, r, n, c.p};

      Rng rng = arm_stream(c, n, r, Arm::Noisy);
      const DiagonalMetric truth = make_true_metric(knowledge_for(c, Arm::Noisy), rep.theta, rng);
      std::optional<FittedModel> dml;
      std::optional<FittedModel> lasso;
      record(table.rows, key, "dmlreg_laplace", "noisy", "learned", [&] {
        dml = fit_linreg_laplace(train.x, train.y, learned_metric(c, train.x, truth, c.p),
                                 c.fit_options);
        return val_mse(*dml, validation);
      });
      record(table.rows, key, "lasso", "none", "none", [&] {
        lasso = fit_lasso(train.x, train.y, 1.0);
        return val_mse(*lasso, validation);
      });
      if (!dml || !lasso) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        table.coefficients.push_back({r, n, j + 1, j < c.relevant_count, rep.theta[j],
                                      dml->coefficients[j], lasso->coefficients[j]});
      }
    }
  }
  finish(table);
  return table;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::Fig1: return run_fig1(config);
    case ExperimentKind::Fig3: return run_fig3(config);
    case ExperimentKind::Fig4: return run_fig4(config);
    case ExperimentKind::Fig5: return run_fig5(config);
  }
  fail(ErrorCode::InvalidConfig, "unknown experiment");
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment, a.knowledge, a.n, a.p, a.replicate, a.model, a.metric_source) <
           std::tie(b.experiment, b.knowledge, b.n, b.p, b.replicate, b.model, b.metric_source);
  });
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, std::string, Eigen::Index,
                         std::size_t>;
  std::map<Key, SummaryRow> groups;
  std::map<Key, double> sums;
  for (const auto& row : rows) {
    const Key key{row.experiment, row.knowledge, row.model, row.metric_source, row.n, row.p};
    auto [it, inserted] = groups.try_emplace(key);
    SummaryRow& s = it->second;
    if (inserted) {
      s.experiment = row.experiment;
      s.n = row.n;
      s.p = row.p;
      s.model = row.model;
      s.knowledge = row.knowledge;
      s.metric_source = row.metric_source;
    }
    if (std::isnan(row.val_mse)) {
      ++s.failed;
    } else {
      sums[key] += row.val_mse;
      ++s.count;
    }
  }
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& [key, s] : groups) {
    s.mean_val_mse = s.count > 0 ? sums[key] / static_cast<double>(s.count)
                                 : std::numeric_limits<double>::quiet_NaN();
    out.push_back(s);
  }
  return out;
}

}  // namespace dmlreg
