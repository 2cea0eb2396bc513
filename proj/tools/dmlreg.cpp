// dmlreg command-line interface.
//
//   dmlreg gen          --n N --m M --seed S --out DIR
//   dmlreg true-metric  --theta theta.json --knowledge {perfect|noisy|incorrect} --out metric.json
//   dmlreg pairs        --data X.csv --metric metric.json --p P --out pairs.json
//   dmlreg learn-metric --data X.csv --pairs pairs.json --out metric.json
//   dmlreg fit          --model {linreg|logreg} --prior {gaussian|laplace|none}
//                       --metric metric.json --data DIR --out model.json
//   dmlreg predict      --model model.json --data X.csv --out predictions.csv
//   dmlreg experiment   {fig1|fig3|fig4|fig5} --replicates R --seed S --out DIR
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmlreg/error.hpp"
#include "dmlreg/experiment.hpp"
#include "dmlreg/expert_sim.hpp"
#include "dmlreg/glm.hpp"
#include "dmlreg/io.hpp"
#include "dmlreg/metric_learning.hpp"
#include "dmlreg/report.hpp"

namespace fs = std::filesystem;
using namespace dmlreg;

namespace {

constexpr int kConfigError = 2;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

fs::path training_file(const fs::path& data) {
  return fs::is_directory(data) ? data / "train.csv" : data;
}

struct GenArgs {
  long n = 0;
  long m = 100;
  long m_val = 900;
  std::optional<long> relevant;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  GenConfig g;
  g.n = a.n;
  g.m = a.m;
  g.m_val = a.m_val;
  g.relevant_count = a.relevant ? *a.relevant : std::min<long>(10, a.n);
  g.noise_sd = a.noise_sd;
  g.validate();
  Rng base(a.seed);
  Rng theta_rng = base.substream(1);
  Rng data_rng = base.substream(2);
  const Vector theta = sample_theta(g, theta_rng);
  const SplitDataset d = generate_dataset(theta, g, data_rng);
  const fs::path out(a.out);
  ensure_dir(out);
  write_dataset_csv(out / "train.csv", d.train.x, d.train.y);
  write_dataset_csv(out / "validation.csv", d.validation.x, d.validation.y);
  write_json(out / "theta.json", theta_to_json(theta));
  std::cout << "wrote " << a.m << " training and " << a.m_val << " validation rows with "
            << a.n << " features to " << out.string() << '\n';
  return 0;
}

struct TrueMetricArgs {
  std::string theta;
  std::string knowledge = "perfect";
  double noise_sd = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int run_true_metric(const TrueMetricArgs& a) {
  const Vector theta = theta_from_json(read_json(a.theta));
  KnowledgeType kind;
  if (a.knowledge == "perfect") {
    kind = KnowledgeType::perfect();
  } else if (a.knowledge == "noisy") {
    kind = KnowledgeType::noisy(a.noise_sd);
  } else if (a.knowledge == "incorrect") {
    kind = KnowledgeType::incorrect();
  } else {
    fail(ErrorCode::InvalidConfig, "unknown knowledge type '" + a.knowledge + "'");
  }
  Rng rng(a.seed);
  write_json(a.out, to_json(make_true_metric(kind, theta, rng)));
  return 0;
}

struct PairsArgs {
  std::string data;
  std::string metric;
  std::size_t p = 300;
  std::string out;
};

int run_pairs(const PairsArgs& a) {
  const Dataset d = read_dataset_csv(training_file(a.data));
  const DiagonalMetric metric = metric_from_json(read_json(a.metric));
  write_json(a.out, to_json(generate_pair_sets(d.x, metric, a.p)));
  return 0;
}

struct LearnArgs {
  std::string data;
  std::string pairs;
  std::string out;
  MetricLearnOptions opts;
  bool unit_mean = false;
};

int run_learn(const LearnArgs& a) {
  const Dataset d = read_dataset_csv(training_file(a.data));
  const PairSets pairs = pairs_from_json(read_json(a.pairs));
  const MetricLearnResult r = learn_metric_detailed(d.x, pairs, a.opts);
  const DiagonalMetric metric = a.unit_mean ? r.metric.unit_mean() : r.metric;
  write_json(a.out, to_json(metric));
  std::cout << "iterations " << r.iterations << (r.converged ? " (converged)" : " (budget reached)")
            << ", similar objective " << r.objective_history.back() << ", dissimilar sum "
            << r.dissimilar_sum << '\n';
  return 0;
}

struct FitArgs {
  std::string model = "linreg";
  std::string prior = "gaussian";
  std::string metric;
  std::string metric_scale = "as-is";
  std::string data;
  std::string out;
  std::string solver = "proximal";
  FitOptions opts;
};

int run_fit(const FitArgs& a) {
  ModelSpec spec;
  spec.likelihood = parse_likelihood(a.model);
  spec.prior = parse_prior(a.prior);
  if (a.solver == "subgradient") {
    FitOptions& o = const_cast<FitOptions&>(a.opts);
    o.laplace_solver = LaplaceSolver::Subgradient;
  } else if (a.solver != "proximal") {
    fail(ErrorCode::InvalidConfig, "unknown solver '" + a.solver + "'");
  }
  const Dataset train = read_dataset_csv(training_file(a.data));
  if (train.y.size() != train.x.rows()) {
    fail(ErrorCode::DimensionMismatch, "training data has no y column");
  }
  if (spec.prior != Prior::None) {
    if (a.metric.empty()) fail(ErrorCode::InvalidConfig, "--metric is required unless --prior none");
    spec.metric = metric_from_json(read_json(a.metric));
    if (a.metric_scale == "unit-mean") {
      spec.metric = spec.metric.unit_mean();
    } else if (a.metric_scale != "as-is") {
      fail(ErrorCode::InvalidConfig, "unknown metric scale '" + a.metric_scale + "'");
    }
  }
  const FittedModel model = fit(spec, train.x, train.y, a.opts);
  write_json(a.out, to_json(model));
  std::cout << "objective " << model.diagnostics.objective << ", iterations "
            << model.diagnostics.iterations << (model.diagnostics.converged ? ", converged" : ", not converged")
            << '\n';
  const fs::path val = fs::path(a.data) / "validation.csv";
  if (fs::is_directory(a.data) && fs::exists(val)) {
    const Dataset v = read_dataset_csv(val);
    if (spec.likelihood == Likelihood::GaussianLinear && v.y.size() == v.x.rows()) {
      std::cout << "validation mse " << mse(v.y, predict(model, v.x)) << '\n';
    }
  }
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string data;
  std::string out;
};

int run_predict(const PredictArgs& a) {
  const FittedModel model = model_from_json(read_json(a.model));
  const Dataset d = read_dataset_csv(a.data);
  const Vector pred = predict(model, d.x);
  std::ofstream out(a.out, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + a.out);
  out << "prediction\n";
  for (Eigen::Index i = 0; i < pred.size(); ++i) out << format_double(pred[i]) << '\n';
  if (d.y.size() == d.x.rows() && model.spec.likelihood == Likelihood::GaussianLinear) {
    std::cout << "mse " << mse(d.y, pred) << '\n';
  }
  return 0;
}

struct ExperimentArgs {
  std::string kind;
  std::string out;
  std::string config_file;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  std::vector<long> n_values;
  std::optional<std::size_t> p;
  std::vector<std::size_t> p_values;
  std::optional<long> m;
  std::optional<long> m_val;
  std::vector<std::string> arms;
  std::optional<int> metric_iters;
  std::optional<int> folds;
  bool logistic = false;
  bool timing = false;
  bool resample_theta = false;
  bool true_metric_arms = false;
};

// Keys mirror the long flag names.
void apply_config_file(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") continue;
      if (key == "replicates") c.replicates = value.get<int>();
      else if (key == "seed") c.base_seed = value.get<std::uint64_t>();
      else if (key == "n-values") c.n_values = value.get<std::vector<Eigen::Index>>();
      else if (key == "p") c.p = value.get<std::size_t>();
      else if (key == "p-values") c.p_values = value.get<std::vector<std::size_t>>();
      else if (key == "m") c.m = value.get<Eigen::Index>();
      else if (key == "m-val") c.m_val = value.get<Eigen::Index>();
      else if (key == "metric-iters") c.metric_options.max_iterations = value.get<int>();
      else if (key == "folds") c.cv_folds = value.get<int>();
      else if (key == "logistic") c.logistic = value.get<bool>();
      else if (key == "timing") c.record_timing = value.get<bool>();
      else if (key == "resample-theta") c.resample_theta = value.get<bool>();
      else if (key == "true-metric-arms") c.true_metric_arms = value.get<bool>();
      else if (key == "arms") {
        c.arms.clear();
        for (const auto& a : value) c.arms.push_back(parse_arm(a.get<std::string>()));
      } else {
        fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("config file: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json arms = nlohmann::json::array();
  for (Arm a : c.arms) arms.push_back(to_string(a));
  return {{"experiment", to_string(c.experiment)},
          {"replicates", c.replicates},
          {"seed", c.base_seed},
          {"n-values", c.n_values},
          {"p", c.p},
          {"p-values", c.p_values},
          {"m", c.m},
          {"m-val", c.m_val},
          {"arms", arms},
          {"metric-iters", c.metric_options.max_iterations},
          {"folds", c.cv_folds},
          {"logistic", c.logistic},
          {"timing", c.record_timing},
          {"resample-theta", c.resample_theta},
          {"true-metric-arms", c.true_metric_arms}};
}

int run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentConfig c = ExperimentConfig::defaults(parse_experiment(a.kind));
  if (!a.config_file.empty()) {
    nlohmann::json j;
    try {
      j = read_json(a.config_file);
    } catch (const Error& e) {
      fail(ErrorCode::InvalidConfig, e.what());
    }
    apply_config_file(c, j);
  }
  if (a.replicates) c.replicates = *a.replicates;
  if (a.seed) c.base_seed = *a.seed;
  if (!a.n_values.empty()) c.n_values.assign(a.n_values.begin(), a.n_values.end());
  if (a.p) c.p = *a.p;
  if (!a.p_values.empty()) c.p_values = a.p_values;
  if (a.m) c.m = *a.m;
  if (a.m_val) c.m_val = *a.m_val;
  if (!a.arms.empty()) {
    c.arms.clear();
    for (const auto& s : a.arms) c.arms.push_back(parse_arm(s));
  }
  if (a.metric_iters) c.metric_options.max_iterations = *a.metric_iters;
  if (a.folds) c.cv_folds = *a.folds;
  c.logistic = c.logistic || a.logistic;
  c.record_timing = c.record_timing || a.timing;
  c.resample_theta = c.resample_theta || a.resample_theta;
  c.true_metric_arms = c.true_metric_arms || a.true_metric_arms;
  if (c.metric_options.max_iterations < 1) {
    fail(ErrorCode::InvalidConfig, "metric-iters must be >= 1");
  }
  c.validate();

  const ResultTable table = run_experiment(c);
  write_experiment_outputs(c, table, a.out);
  write_json(fs::path(a.out) / "config.json", config_to_json(c));

  const auto summary = summarize(table.rows);
  std::cout << render_csv(to_table(summary));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-metric-learning regularization for linear and logistic models"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic train/validation dataset");
  gen_cmd->add_option("--n", gen.n, "Feature count")->required();
  gen_cmd->add_option("--m", gen.m, "Training rows");
  gen_cmd->add_option("--m-val", gen.m_val, "Validation rows");
  gen_cmd->add_option("--relevant", gen.relevant, "Number of nonzero coefficients (default min(10, n))");
  gen_cmd->add_option("--noise-sd", gen.noise_sd, "Response noise standard deviation");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  TrueMetricArgs tm;
  auto* tm_cmd = app.add_subcommand("true-metric", "Simulate an expert's metric from theta");
  tm_cmd->add_option("--theta", tm.theta, "theta.json")->required();
  tm_cmd->add_option("--knowledge", tm.knowledge, "perfect, noisy or incorrect");
  tm_cmd->add_option("--noise-sd", tm.noise_sd, "Perturbation sd for noisy knowledge");
  tm_cmd->add_option("--seed", tm.seed, "Random seed");
  tm_cmd->add_option("--out", tm.out, "Output metric JSON")->required();

  PairsArgs pa;
  auto* pairs_cmd = app.add_subcommand("pairs", "Label the p closest/farthest row pairs");
  pairs_cmd->add_option("--data", pa.data, "Dataset CSV or directory")->required();
  pairs_cmd->add_option("--metric", pa.metric, "Metric JSON")->required();
  pairs_cmd->add_option("--p", pa.p, "Pairs per set");
  pairs_cmd->add_option("--out", pa.out, "Output pairs JSON")->required();

  LearnArgs la;
  auto* learn_cmd = app.add_subcommand("learn-metric", "Learn a diagonal metric from pair sets");
  learn_cmd->add_option("--data", la.data, "Dataset CSV or directory")->required();
  learn_cmd->add_option("--pairs", la.pairs, "Pairs JSON")->required();
  learn_cmd->add_option("--out", la.out, "Output metric JSON")->required();
  learn_cmd->add_option("--max-iter", la.opts.max_iterations, "Iteration budget");
  learn_cmd->add_option("--step", la.opts.step_size, "Relative step size");
  learn_cmd->add_option("--tol", la.opts.tolerance, "Relative objective-change tolerance");
  learn_cmd->add_flag("--unit-mean", la.unit_mean, "Rescale the result to mean weight 1");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a MAP linear or logistic model");
  fit_cmd->add_option("--model", fa.model, "linreg or logreg");
  fit_cmd->add_option("--prior", fa.prior, "gaussian, laplace or none");
  fit_cmd->add_option("--metric", fa.metric, "Metric JSON (prior scales)");
  fit_cmd->add_option("--metric-scale", fa.metric_scale, "as-is or unit-mean");
  fit_cmd->add_option("--data", fa.data, "Dataset directory (train.csv) or CSV")->required();
  fit_cmd->add_option("--out", fa.out, "Output model JSON")->required();
  fit_cmd->add_option("--solver", fa.solver, "Laplace solver: proximal or subgradient");
  fit_cmd->add_option("--max-iter", fa.opts.max_iterations, "Iteration budget");
  fit_cmd->add_option("--lr", fa.opts.learning_rate, "Initial logistic learning rate");
  fit_cmd->add_option("--tol", fa.opts.tolerance, "Gradient tolerance");
  fit_cmd->add_option("--prior-floor", fa.opts.prior_floor, "Minimum prior scale");
  fit_cmd->add_flag("--intercept", fa.opts.fit_intercept, "Fit an unpenalized intercept");
  fit_cmd->add_flag("--standardize", fa.opts.standardize, "Scale columns to unit sd");

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a fitted model");
  predict_cmd->add_option("--model", pr.model, "Model JSON")->required();
  predict_cmd->add_option("--data", pr.data, "Dataset CSV")->required();
  predict_cmd->add_option("--out", pr.out, "Output predictions CSV")->required();

  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a simulated-expert experiment");
  exp_cmd->add_option("kind", ea.kind, "fig1, fig3, fig4 or fig5")->required();
  exp_cmd->add_option("--out", ea.out, "Output directory")->required();
  exp_cmd->add_option("--config", ea.config_file, "JSON file mirroring these flags");
  exp_cmd->add_option("--replicates", ea.replicates, "Datasets per sweep point");
  exp_cmd->add_option("--seed", ea.seed, "Base seed");
  exp_cmd->add_option("--n-values", ea.n_values, "Feature counts")->delimiter(',');
  exp_cmd->add_option("--p", ea.p, "Pairs per set (fig3, fig5)");
  exp_cmd->add_option("--p-values", ea.p_values, "Pair counts (fig4)")->delimiter(',');
  exp_cmd->add_option("--m", ea.m, "Training rows");
  exp_cmd->add_option("--m-val", ea.m_val, "Validation rows");
  exp_cmd->add_option("--arms", ea.arms, "Knowledge arms")->delimiter(',');
  exp_cmd->add_option("--metric-iters", ea.metric_iters, "Metric-learning iteration budget");
  exp_cmd->add_option("--folds", ea.folds, "Cross-validation folds (fig1)");
  exp_cmd->add_flag("--logistic", ea.logistic, "Also fit logistic models on median-split labels");
  exp_cmd->add_flag("--timing", ea.timing, "Record wall time per fit");
  exp_cmd->add_flag("--resample-theta", ea.resample_theta, "Fresh theta per replicate");
  exp_cmd->add_flag("--true-metric-arms", ea.true_metric_arms, "Also fit with the true metric");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*tm_cmd) return run_true_metric(tm);
    if (*pairs_cmd) return run_pairs(pa);
    if (*learn_cmd) return run_learn(la);
    if (*fit_cmd) return run_fit(fa);
    if (*predict_cmd) return run_predict(pr);
    if (*exp_cmd) return run_experiment_cmd(ea);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
