#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "dmlreg/error.hpp"
#include "dmlreg/experiment.hpp"
#include "dmlreg/report.hpp"
#include "golden.hpp"

using namespace dmlreg;

static ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

static ExperimentConfig small(ExperimentKind kind, int replicates) {
  ExperimentConfig c = ExperimentConfig::defaults(kind);
  c.n_values = {10, 25};
  c.p_values = {25, 100};
  c.m_val = 200;
  c.p = 100;
  c.replicates = replicates;
  c.base_seed = 77;
  return c;
}

TEST_CASE("defaults") {
  const ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Fig3);
  CHECK(c.n_values == std::vector<Eigen::Index>{10, 25, 50, 75, 100});
  CHECK(c.m == 100);
  CHECK(c.m_val == 900);
  CHECK(c.p == 300);
  CHECK(c.replicates == 100);
  CHECK(c.arms == std::vector<Arm>{Arm::Perfect, Arm::Noisy, Arm::Incorrect, Arm::Euclidean});
  const ExperimentConfig f4 = ExperimentConfig::defaults(ExperimentKind::Fig4);
  CHECK(f4.n_values == std::vector<Eigen::Index>{100});
  CHECK(f4.replicates == 1);
  CHECK(f4.p_values.front() == 25);
  CHECK(f4.p_values.back() == 700);
  CHECK(std::find(f4.p_values.begin(), f4.p_values.end(), 300) != f4.p_values.end());
  CHECK(ExperimentConfig::defaults(ExperimentKind::Fig5).n_values == std::vector<Eigen::Index>{100});
}

TEST_CASE("config validation") {
  ExperimentConfig c = small(ExperimentKind::Fig3, 1);
  c.replicates = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  c = small(ExperimentKind::Fig3, 1);
  c.n_values.clear();
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  c = small(ExperimentKind::Fig3, 1);
  c.p = 3000;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::TooManyPairs);
  CHECK(code_of([] { parse_experiment("fig2"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_arm("psychic"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("fig3 rows, determinism and golden output") {
  const ExperimentConfig c = small(ExperimentKind::Fig3, 2);
  const ResultTable a = run_fig3(c);
  CHECK(a.rows.size() == 2 * 2 * 4);
  for (const ResultRow& r : a.rows) {
    CHECK(r.val_mse >= 0);
    CHECK(r.wall_ms == 0);
    CHECK(r.metric_source == (r.knowledge == "euclidean" ? "euclidean" : "learned"));
  }
  const std::string csv = render_csv(to_table(a.rows));
  CHECK(csv == render_csv(to_table(run_fig3(c).rows)));
  check_golden("fig3_small.csv", csv);
}

TEST_CASE("replicate results do not depend on other replicates") {
  for (ExperimentKind kind : {ExperimentKind::Fig1, ExperimentKind::Fig3}) {
    const ResultTable two = run_experiment(small(kind, 2));
    const ResultTable three = run_experiment(small(kind, 3));
    std::vector<ResultRow> kept;
    for (const ResultRow& r : three.rows)
      if (r.replicate < 2) kept.push_back(r);
    CHECK(render_csv(to_table(kept)) == render_csv(to_table(two.rows)));
  }
}

TEST_CASE("summary means equal replicate means") {
  const ResultTable t = run_fig1(small(ExperimentKind::Fig1, 3));
  CHECK(t.rows.size() == 2 * 3 * 4);
  std::map<std::tuple<Eigen::Index, std::string>, std::pair<double, int>> acc;
  for (const ResultRow& r : t.rows) {
    auto& [sum, n] = acc[{r.n, r.model}];
    sum += r.val_mse;
    ++n;
  }
  const auto summary = summarize(t.rows);
  CHECK(summary.size() == acc.size());
  for (const SummaryRow& s : summary) {
    const auto& [sum, n] = acc.at({s.n, s.model});
    CHECK(s.count == n);
    CHECK(s.failed == 0);
    CHECK(std::abs(s.mean_val_mse - sum / n) <= 1e-12);
  }
  std::vector<ResultRow> with_failure = t.rows;
  with_failure[0].val_mse = NAN;
  for (const SummaryRow& s : summarize(with_failure))
    if (s.n == with_failure[0].n && s.model == with_failure[0].model) CHECK(s.failed == 1);
}

TEST_CASE("sorting is by experiment, knowledge, n, p, replicate") {
  std::vector<ResultRow> rows{{"fig3", 1, 10, 300, "m", "noisy", "learned", 1, 0},
                              {"fig3", 0, 25, 300, "m", "noisy", "learned", 1, 0},
                              {"fig3", 0, 10, 300, "m", "noisy", "learned", 1, 0},
                              {"fig3", 5, 10, 300, "m", "euclidean", "euclidean", 1, 0}};
  sort_rows(rows);
  CHECK(rows[0].knowledge == "euclidean");
  CHECK(rows[1].replicate == 0);
  CHECK(rows[1].n == 10);
  CHECK(rows[2].replicate == 1);
  CHECK(rows[3].n == 25);
}

TEST_CASE("fig4 and fig5 tables") {
  ExperimentConfig c4 = small(ExperimentKind::Fig4, 1);
  c4.n_values = {20};
  c4.arms = {Arm::Noisy, Arm::Euclidean};
  const ResultTable t4 = run_fig4(c4);
  CHECK(t4.rows.size() == 2 * 2);

  ExperimentConfig c5 = small(ExperimentKind::Fig5, 1);
  c5.n_values = {20};
  const ResultTable t5 = run_fig5(c5);
  CHECK(t5.coefficients.size() == 20);
  for (const CoefficientRow& r : t5.coefficients) {
    CHECK(r.relevant == (r.feature <= 10));
    if (!r.relevant) CHECK(r.theta_true == 0.0);
  }
  CHECK(render_csv(to_table(t5.coefficients)) == render_csv(to_table(run_fig5(c5).coefficients)));
}

TEST_CASE("logistic diagnostics") {
  ExperimentConfig c = small(ExperimentKind::Fig3, 1);
  c.n_values = {10};
  c.logistic = true;
  const ResultTable t = run_fig3(c);
  CHECK(!t.logistic.empty());
  for (const LogisticRow& r : t.logistic) {
    CHECK(r.val_accuracy >= 0.5);
    CHECK(r.val_accuracy <= 1.0);
  }
  CHECK(t.rows.size() == 4);
}
