#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include "json.hpp"
#include <sstream>

#include "robustl1/harness.hpp"

using namespace robustl1;

namespace {

SweepSpec small_breakdown() {
  SweepSpec s;
  s.experiment = Experiment::kBreakdown1d;
  s.methods = {"l1", "torrent", "filter"};
  s.grid = {0.0, 0.1, 0.2, 0.3, 0.4};
  s.m = 200;
  s.trials_per_point = 3;
  s.base_seed = 11;
  return s;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(out, r);
  return out.str();
}

}  // namespace

TEST(Experiment, NamesRoundTrip) {
  for (Experiment e : {Experiment::kBreakdown1d, Experiment::kSampleComplexity,
                       Experiment::kDenseNoiseScaling, Experiment::kPThresholdCurve,
                       Experiment::kLowerBoundDense}) {
    EXPECT_EQ(parse_experiment(experiment_name(e)), e);
  }
  EXPECT_THROW(parse_experiment("nope"), std::invalid_argument);
}

TEST(SweepSpec, ValidateRejectsUnknownMethodBeforeWork) {
  SweepSpec s = small_breakdown();
  s.methods = {"l1", "simplex"};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_THROW(run_sweep(s), std::invalid_argument);
  s = small_breakdown();
  s.grid = {0.2, 0.1};
  EXPECT_THROW(run_sweep(s), std::invalid_argument);
  s = small_breakdown();
  s.n = 2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(SweepSpec, FromConfig) {
  const KeyValueConfig cfg = KeyValueConfig::parse(
      "experiment = sample_complexity\nmethods = l1_constrained, ls\nm_grid = 64,128\n"
      "n = 32\nk = 2\nbase_seed = 9\nlambda_policy = multiple\nlambda_multiple = 1.5\n"
      "threads = 3\nmax_iterations = 777\n");
  const SweepSpec s = SweepSpec::from_config(cfg);
  EXPECT_EQ(s.experiment, Experiment::kSampleComplexity);
  EXPECT_EQ(s.methods, (std::vector<std::string>{"l1_constrained", "ls"}));
  EXPECT_EQ(s.grid, (std::vector<double>{64, 128}));
  EXPECT_EQ(s.n, 32u);
  EXPECT_EQ(s.base_seed, 9u);
  EXPECT_EQ(s.lambda_policy, LambdaPolicy::kMultiple);
  EXPECT_EQ(s.threads, 3u);
  EXPECT_EQ(s.solver.max_iterations, 777u);
  EXPECT_THROW(SweepSpec::from_config(KeyValueConfig::parse("lambda_policy = loose\n")),
               ConfigError);
}

TEST(JobSeed, DistinctPerJobAndStable) {
  const SweepSpec s = small_breakdown();
  EXPECT_EQ(job_seed(s, 1, 2), job_seed(s, 1, 2));
  EXPECT_NE(job_seed(s, 1, 2), job_seed(s, 2, 1));
  EXPECT_NE(job_seed(s, 0, 0), job_seed(s, 0, 1));
  SweepSpec d = s;
  d.experiment = Experiment::kDenseNoiseScaling;
  EXPECT_EQ(job_seed(d, 0, 1), job_seed(d, 3, 1));
}

TEST(BreakdownSweep, RowOrderAndCount) {
  const SweepSpec s = small_breakdown();
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 3u * 5u * 3u);
  std::size_t i = 0;
  for (const auto& method : s.methods)
    for (double g : s.grid)
      for (std::size_t t = 0; t < 3; ++t, ++i) {
        EXPECT_EQ(r.rows[i].method, method);
        EXPECT_EQ(r.rows[i].grid_value, g);
        EXPECT_EQ(r.rows[i].trial, t);
      }
}

TEST(BreakdownSweep, ByteIdenticalAcrossThreadCounts) {
  SweepSpec s = small_breakdown();
  s.threads = 1;
  const std::string one = csv_of(run_sweep(s));
  s.threads = 4;
  EXPECT_EQ(csv_of(run_sweep(s)), one);
  s.threads = 7;
  EXPECT_EQ(csv_of(run_sweep(s)), one);
}

TEST(BreakdownSweep, CleanPointIsExactAndErrorsGrow) {
  const SweepResult r = run_sweep(small_breakdown());
  for (const auto& row : r.rows) {
    if (row.grid_value == 0.0) EXPECT_LE(row.relative_l2_error, 1e-6) << row.method;
  }
  const auto b = estimate_breakdown(r, "l1");
  ASSERT_TRUE(b.has_value());
  EXPECT_GE(*b, 0.2);
  EXPECT_LE(*b, 0.3);
  // Past breakdown the median error does not shrink as η grows.
  double prev = 0.0;
  for (const auto& g : summarize(r)) {
    if (g.method != "l1" || g.grid_value < *b) continue;
    EXPECT_GE(g.median_error, prev);
    prev = g.median_error;
  }
}

TEST(BreakdownSweep, RowReplaysFromSeed) {
  const SweepSpec s = small_breakdown();
  const SweepResult r = run_sweep(s);
  for (std::size_t i : {4u, 20u, 38u}) {
    const SweepRow& row = r.rows[i];
    const Problem p = make_instance(s, row.grid_value, row.seed);
    const SolverResult again = solve_with_method(s, row.method, p, s.p);
    EXPECT_NEAR(relative_error(again.estimate, p.w_star), row.relative_l2_error, 1e-9);
    EXPECT_NEAR(again.objective, row.objective, 1e-9 * (1.0 + row.objective));
  }
}

TEST(BreakdownSweep, TorrentAtHalfIsRecordedAsFailure) {
  SweepSpec s = small_breakdown();
  s.methods = {"torrent"};
  s.grid = {0.5};
  s.trials_per_point = 1;
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(std::isinf(r.rows[0].relative_l2_error));
  EXPECT_FALSE(r.rows[0].converged);
}

TEST(SampleComplexity, GridIsRowCount) {
  SweepSpec s;
  s.experiment = Experiment::kSampleComplexity;
  s.methods = {"l1_constrained"};
  s.grid = {40, 80};
  s.n = 20;
  s.k = 2;
  s.amplitude = 1.0;
  s.trials_per_point = 2;
  const Problem p = make_instance(s, 80, 3);
  EXPECT_EQ(p.rows(), 80u);
  EXPECT_EQ(p.cols(), 20u);
  EXPECT_EQ(p.sparsity(), 2u);
  const SweepResult r = run_sweep(s);
  EXPECT_EQ(r.rows.size(), 4u);
}

TEST(DenseNoise, SharedInstanceAlongGrid) {
  SweepSpec s;
  s.experiment = Experiment::kDenseNoiseScaling;
  s.grid = {10, 20};
  s.m = 300;
  s.n = 5;
  s.k = 5;
  s.amplitude = 1.0;
  s.eta = 0.1;
  s.trials_per_point = 1;
  const Problem a = make_instance(s, 10, 4);
  const Problem b = make_instance(s, 20, 4);
  EXPECT_TRUE(a.x == b.x);
  EXPECT_EQ(a.w_star, b.w_star);
  EXPECT_NEAR(l1_norm(a.d), 10.0, 1e-9);
  EXPECT_NEAR(l1_norm(b.d), 20.0, 1e-9);
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_LT(r.rows[0].relative_l2_error, r.rows[1].relative_l2_error);
}

TEST(LowerBoundDense, FiniteNearUpperEpsilon) {
  SweepSpec s;
  s.experiment = Experiment::kLowerBoundDense;
  s.grid = {0.05, 0.199};
  s.m = 400;
  s.n = 3;
  s.k = 3;
  s.amplitude = 1.0;
  s.trials_per_point = 2;
  const SweepResult r = run_sweep(s);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(std::isfinite(row.value)) << row.grid_value;
    EXPECT_GE(row.value, 0.0);
  }
  s.grid = {0.2};
  EXPECT_THROW(run_sweep(s), std::invalid_argument);
}

TEST(PThresholdCurve, AnalyticRowsDecrease) {
  SweepSpec s;
  s.experiment = Experiment::kPThresholdCurve;
  s.grid = {0.1, 0.3, 0.5, 0.7, 1.0};
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 5u);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_LT(r.rows[i].value, r.rows[i - 1].value);
  EXPECT_NEAR(r.rows.back().value, eta0().value(), 1e-6);
}

TEST(PThresholdCurve, EmpiricalRowsAppended) {
  SweepSpec s;
  s.experiment = Experiment::kPThresholdCurve;
  s.grid = {0.5};
  s.empirical = true;
  s.inner_grid = {0.1, 0.45, 0.6};
  s.m = 200;
  s.trials_per_point = 2;
  s.solver.lp_restarts = 2;
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[1].method, "lp");
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_GT(r.rows[i].value, 0.1);
    EXPECT_LE(r.rows[i].value, 0.6);
  }
}

TEST(Summary, MedianAndJson) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
  const SweepSpec s = small_breakdown();
  const SweepResult r = run_sweep(s);
  const auto doc = nlohmann::json::parse(sweep_summary_json(s, r));
  EXPECT_EQ(doc["experiment"], "breakdown_1d");
  EXPECT_EQ(doc["points"].size(), 15u);
  EXPECT_TRUE(doc["breakdown"].contains("torrent"));
}

TEST(Csv, HeaderAndRowCount) {
  const std::string csv = csv_of(run_sweep(small_breakdown()));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,grid_value,trial,seed,relative_l2_error,objective,iterations,converged,"
            "estimate_norm,value");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 46);
}

TEST(RecoverySearch, DoublesUntilRecovered) {
  SweepSpec s;
  s.n = 40;
  s.k = 2;
  s.amplitude = 1.0;
  s.eta = 0.1;
  const RecoverySearch r = find_recovery_sample_size(s, 1, 16, 512);
  ASSERT_FALSE(r.tried.empty());
  EXPECT_EQ(r.tried.front(), 16u);
  for (std::size_t i = 1; i < r.tried.size(); ++i) EXPECT_EQ(r.tried[i], 2 * r.tried[i - 1]);
  ASSERT_TRUE(r.recovered_at.has_value());
  EXPECT_EQ(*r.recovered_at, r.tried.back());
  EXPECT_LE(r.errors.back(), kExactRecoveryThreshold);
  EXPECT_THROW(find_recovery_sample_size(s, 1, 0, 10), std::invalid_argument);
}

TEST(ShippedConfigs, AllParseAndValidate) {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(ROBUSTL1_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    const SweepSpec s = SweepSpec::from_config(KeyValueConfig::load(entry.path().string()));
    EXPECT_NO_THROW(s.validate()) << entry.path();
    ++seen;
  }
  EXPECT_EQ(seen, 5u);
}
