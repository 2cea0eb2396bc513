// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dmlreg/baselines.hpp"
#include "dmlreg/experiment.hpp"
#include "dmlreg/expert_sim.hpp"
#include "dmlreg/glm.hpp"
#include "dmlreg/metric_learning.hpp"
#include "oracles.hpp"

using namespace dmlreg;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 2019;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? NAN : s / static_cast<double>(v.size());
}

// Mean val_mse per key over the rows accepted by `pick`.
std::map<std::string, std::vector<double>> collect(
    const std::vector<ResultRow>& rows, const std::function<bool(const ResultRow&)>& pick,
    const std::function<std::string(const ResultRow&)>& key) {
  std::map<std::string, std::vector<double>> out;
  for (const ResultRow& r : rows)
    if (pick(r)) out[key(r)].push_back(r.val_mse);
  return out;
}

Outcome identities() {
  Rng rng(kSeed);
  double worst_ridge = 0, worst_gap = 0;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(50));
    const Eigen::Index m = 10 + static_cast<Eigen::Index>(rng.below(90));
    const Matrix x = oracle::random_matrix(rng, m, n);
    const Vector y = oracle::random_matrix(rng, m, 1).col(0);
    const double lambda = std::pow(10.0, -2.0 + 4.0 * rng.uniform01());
    const Vector expect = oracle::ridge(x, y, Vector::Constant(n, lambda));
    const Vector got =
        fit_linreg_gaussian(x, y, DiagonalMetric(Vector::Constant(n, 1.0 / lambda))).coefficients;
    worst_ridge = std::max(worst_ridge, (got - expect).norm() / expect.norm());
  }
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(20));
    const Matrix x = oracle::random_matrix(rng, 30, n);
    const Vector y = 3 * oracle::random_matrix(rng, 30, 1).col(0);
    const Vector ones = Vector::Ones(n);
    const double best = linreg_laplace_objective(x, y, ones, oracle::lasso_cd(x, y, ones));
    const double got = fit_linreg_laplace(x, y, DiagonalMetric::identity(n)).diagnostics.objective;
    worst_gap = std::max(worst_gap, std::abs(got - best));
  }
  return {worst_ridge <= 1e-10 && worst_gap <= 1e-3,
          fmt("max ridge rel err %.3g (<= 1e-10), max lasso objective gap %.3g (<= 1e-3)",
              worst_ridge, worst_gap)};
}

Outcome figure1() {
  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Fig1);
  c.n_values = {10, 100};
  c.replicates = 20;
  c.base_seed = kSeed;
  const ResultTable t = run_fig1(c);
  auto m = collect(t.rows, [](const ResultRow&) { return true; },
                   [](const ResultRow& r) { return r.model + "@" + std::to_string(r.n); });
  const double ols = mean(m["ols@100"]), knn = mean(m["knn@100"]);
  const double lasso100 = mean(m["lasso_cv@100"]), lasso10 = mean(m["lasso_cv@10"]);
  const double ridge100 = mean(m["ridge_cv@100"]), ridge10 = mean(m["ridge_cv@10"]);
  const bool ok = ols > 5 * lasso100 && knn > lasso100 && ridge100 < 3 * ridge10 &&
                  lasso100 < 3 * lasso10;
  return {ok, fmt("n=100: ols %.3f > 5*lasso %.3f, knn %.3f > lasso; ridge %.3f < 3*%.3f, "
                  "lasso %.3f < 3*%.3f",
                  ols, 5 * lasso100, knn, ridge100, ridge10, lasso100, lasso10)};
}

Outcome figure3() {
  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Fig3);
  c.n_values = {100};
  c.replicates = 20;
  c.base_seed = kSeed;
  const ResultTable t = run_fig3(c);
  std::map<std::string, std::vector<double>> arm;
  for (const ResultRow& r : t.rows) {
    if (arm[r.knowledge].size() <= static_cast<std::size_t>(r.replicate))
      arm[r.knowledge].resize(r.replicate + 1, NAN);
    arm[r.knowledge][r.replicate] = r.val_mse;
  }
  const auto& eu = arm["euclidean"];
  auto wins = [&](const std::string& k) {
    int w = 0;
    for (std::size_t i = 0; i < eu.size(); ++i) w += arm[k][i] < eu[i] ? 1 : 0;
    return static_cast<double>(w) / static_cast<double>(eu.size());
  };
  const double wp = wins("perfect"), wn = wins("noisy");
  const double mp = mean(arm["perfect"]), mn = mean(arm["noisy"]), mi = mean(arm["incorrect"]),
               me = mean(eu);
  const bool ok = mp < me && mn < me && wp >= 0.8 && wn >= 0.8 && mi > me;
  return {ok, fmt("mean mse perfect %.3f, noisy %.3f, incorrect %.3f, euclidean %.3f; "
                  "pairwise wins perfect %.2f, noisy %.2f (>= 0.80)",
                  mp, mn, mi, me, wp, wn)};
}

Outcome figure4() {
  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Fig4);
  c.p_values = {25, 300};
  c.arms = {Arm::Noisy};
  c.base_seed = kSeed;
  const ResultTable t = run_fig4(c);
  double at25 = NAN, at300 = NAN;
  for (const ResultRow& r : t.rows) (r.p == 25 ? at25 : at300) = r.val_mse;
  const double ratio = at25 / at300;
  return {std::abs(at25 - at300) <= 0.2 * at300,
          fmt("noisy arm mse p=25 %.4f, p=300 %.4f, ratio %.3f (within 0.8..1.2)", at25, at300,
              ratio)};
}

Outcome figure5() {
  int better = 0;
  std::vector<double> noise_dml, noise_lasso;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Fig5);
    c.base_seed = kSeed + static_cast<std::uint64_t>(s);
    const ResultTable t = run_fig5(c);
    double err_d = 0, err_l = 0, nd = 0, nl = 0;
    int noise = 0;
    for (const CoefficientRow& r : t.coefficients) {
      err_d += std::abs(r.theta_dmlreg - r.theta_true);
      err_l += std::abs(r.theta_lasso - r.theta_true);
      if (!r.relevant) {
        nd += std::abs(r.theta_dmlreg);
        nl += std::abs(r.theta_lasso);
        ++noise;
      }
    }
    better += err_d < err_l ? 1 : 0;
    noise_dml.push_back(nd / noise);
    noise_lasso.push_back(nl / noise);
  }
  const double frac = static_cast<double>(better) / seeds;
  const double md = mean(noise_dml), ml = mean(noise_lasso);
  return {frac >= 0.7 && md < ml,
          fmt("dmlreg closer in %.2f of seeds (>= 0.70); mean |theta| on noise features "
              "dmlreg %.4f < lasso %.4f",
              frac, md, ml)};
}

Outcome metric_learning() {
  const MetricLearnOptions opts = ExperimentConfig{}.metric_options;
  int good = 0, infeasible = 0;
  double lowest = 1;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    Rng base(kSeed + static_cast<std::uint64_t>(s));
    GenConfig g;
    g.n = 25;
    Rng theta_rng = base.substream(1), data_rng = base.substream(2);
    const Vector theta = sample_theta(g, theta_rng);
    const SplitDataset d = generate_dataset(theta, g, data_rng);
    const DiagonalMetric truth = make_true_metric(KnowledgeType::perfect(), theta, theta_rng);
    const PairSets pairs = generate_pair_sets(d.train.x, truth, 300);
    const DiagonalMetric w = learn_metric(d.train.x, pairs, opts);
    if ((w.weights().array() < 0).any() || dissimilar_sum(d.train.x, pairs, w) < 1 - 1e-6) ++infeasible;
    std::vector<double> a, b;
    for (int j = 0; j < 10; ++j) {
      a.push_back(w.weights()[j]);
      b.push_back(std::abs(theta[j]));
    }
    const double rho = oracle::spearman(a, b);
    lowest = std::min(lowest, rho);
    good += rho >= 0.7 ? 1 : 0;
  }
  const double frac = static_cast<double>(good) / seeds;
  return {infeasible == 0 && frac >= 0.8,
          fmt("%d infeasible outputs; spearman >= 0.7 in %.2f of seeds (>= 0.80), min %.3f",
              infeasible, frac, lowest)};
}

Outcome gradients_and_oracles() {
  Rng rng(kSeed);
  double worst_fd = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(10));
    const Matrix x = oracle::random_matrix(rng, 40, n);
    Vector y(40);
    for (Eigen::Index i = 0; i < 40; ++i) y[i] = rng.uniform01() < 0.5 ? 1 : 0;
    const Vector p = sample_uniform(rng, 0.1, 5, n);
    const Vector point = 2 * oracle::random_matrix(rng, n, 1).col(0);
    const double h = 1e-5;
    Vector fd_g(n), fd_l(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector up = point, dn = point;
      up[j] += h;
      dn[j] -= h;
      fd_g[j] = (logreg_gaussian_objective(x, y, p, up) - logreg_gaussian_objective(x, y, p, dn)) / (2 * h);
      fd_l[j] = (logistic_nll(x, y, up) - logistic_nll(x, y, dn)) / (2 * h);
    }
    worst_fd = std::max(worst_fd, (logreg_gaussian_gradient(x, y, p, point) - fd_g).norm() / fd_g.norm());
    worst_fd = std::max(worst_fd, (logistic_nll_gradient(x, y, point) - fd_l).norm() / fd_l.norm());
  }

  int pair_mismatch = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng r(kSeed + s);
    const Eigen::Index m = 4 + static_cast<Eigen::Index>(r.below(27));
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(r.below(6));
    const Matrix x = sample_uniform_matrix(r, 0, 1, m, n);
    const Vector w = sample_uniform(r, 0, 4, n);
    const std::size_t p = 1 + r.below(static_cast<std::uint64_t>(m * (m - 1) / 4));
    const PairSets got = generate_pair_sets(x, DiagonalMetric(w), p);
    const PairSets want = oracle::brute_pairs(x, w, p);
    pair_mismatch += (got.similar == want.similar && got.dissimilar == want.dissimilar) ? 0 : 1;
  }

  double worst_res = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(50));
    const Eigen::Index m = 5 + static_cast<Eigen::Index>(rng.below(100));
    const Matrix x = oracle::random_matrix(rng, m, n);
    const Vector y = 5 * oracle::random_matrix(rng, m, 1).col(0);
    const DiagonalMetric a(sample_uniform(rng, 0.01, 10, n));
    const Vector theta = fit_linreg_gaussian(x, y, a).coefficients;
    const Vector xty = x.transpose() * y;
    const Vector res = x.transpose() * (x * theta) + penalty_weights(a, 1e-6).cwiseProduct(theta) - xty;
    worst_res = std::max(worst_res, res.lpNorm<Eigen::Infinity>() / std::max(1.0, xty.lpNorm<Eigen::Infinity>()));
  }
  return {worst_fd < 1e-5 && pair_mismatch == 0 && worst_res <= 1e-8,
          fmt("max gradient rel err %.3g (< 1e-5); %d/50 pair-set mismatches; max normal-equation "
              "residual %.3g (<= 1e-8)",
              worst_fd, pair_mismatch, worst_res)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "dmlreg_acceptance";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\" experiment fig3 --replicates 3 --seed 42 --out \"" +
                            (root / run).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "cli run failed: " + cmd};
  }
  std::string detail;
  bool ok = true;
  for (const char* f : {"results.csv", "summary.csv", "fig3.svg"}) {
    const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += std::string(f) + (same ? " identical" : " DIFFERS") + "; ";
  }
  return {ok, detail + "(" + std::to_string(slurp(root / "a" / "results.csv").size()) + " csv bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : DMLREG_CLI_PATH;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 ridge/lasso reduction identities", identities},
      {"2 baseline ordering across n", figure1},
      {"3 learned metrics vs euclidean at n=100", figure3},
      {"4 flat in p (25 vs 300)", figure4},
      {"5 coefficient recovery vs lasso", figure5},
      {"6 metric feasibility and recovery", metric_learning},
      {"7 gradient, pair-set and normal-equation oracles", gradients_and_oracles},
      {"8 byte-identical CLI reruns", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
