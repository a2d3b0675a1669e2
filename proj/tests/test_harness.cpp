// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "asclt/error.hpp"
#include "asclt/harness.hpp"

namespace asclt {
namespace {

constexpr const char* kSmall = R"({
  "model": {"drift": 0.1, "gaussian_vol": 0.5, "jump_intensity": 1.5,
            "jump": {"type": "normal", "mean": 0.0, "sd": 0.7071067811865476}},
  "family": {"type": "sqrt_scalar"},
  "horizon": 100, "step": 0.1, "replicates": 7, "base_seed": 99,
  "eval_times": {"t0": 10, "ratio": 10, "count": 2},
  "experiment": "lfq_consistency"
})";

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

TEST(Config, RoundTripIsExact) {
  ExperimentConfig c = parse_config(kSmall);
  c.model.drift = 0.1 + 1e-17 * 3.0;
  c.family.alpha = 1.0 / 3.0;
  const std::string a = config_to_json(c);
  const ExperimentConfig back = parse_config(a);
  EXPECT_EQ(config_to_json(back), a);
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(back.family.alpha, 1.0 / 3.0);
  c.base_seed += 1;
  EXPECT_NE(config_hash(back), config_hash(c));
}

TEST(Config, Rejections) {
  EXPECT_EQ(code_of(R"({"horizon": 100, "stepp": 0.1})"), ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of(R"({"model": {"drift": 1, "extra": 0}})"), ErrorCode::kConfigInvalid);
  // sigma^2 = 0.
  EXPECT_EQ(code_of(R"({"model": {"drift": 1}})"), ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of(R"({"model": {"gaussian_vol": 1}, "replicates": 0})"),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of(R"({"model": {"gaussian_vol": 1}, "horizon": 10, "step": 1})"),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of("{not json"), ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of(R"({"model": {"gaussian_vol": 1}, "experiment": "nope"})"),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of(R"({"model": {"gaussian_vol": 1}})"), ErrorCode::kOk);
}

TEST(Config, EvalTimesAndEstimator) {
  const ExperimentConfig c = parse_config(kSmall);
  EXPECT_EQ(c.eval_time_list(), (std::vector<double>{10.0, 100.0}));
  EXPECT_EQ(c.resolved_estimator(), EstimatorKind::kSigmaHat);
  ExperimentConfig w = c;
  w.family.type = "weighted_exp";
  EXPECT_EQ(w.resolved_estimator(), EstimatorKind::kSigmaTilde);
  ExperimentConfig p = c;
  p.family.type = "power_diag";
  p.family.betas = {1.0};
  EXPECT_EQ(p.resolved_estimator(), EstimatorKind::kMatrixLfq);
}

TEST(Seeds, DistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(replicate_seed(7, i));
  EXPECT_EQ(seen.size(), 100000u);
  EXPECT_EQ(replicate_seed(7, 3), replicate_seed(7, 3));
  EXPECT_NE(replicate_seed(7, 3), replicate_seed(8, 3));
}

TEST(Run, DeterministicAcrossThreads) {
  const ExperimentConfig c = parse_config(kSmall);
  const AggregateReport a = run_experiment(c, 1);
  const AggregateReport b = run_experiment(c, 3);
  ASSERT_EQ(a.replicates.size(), 7u);
  EXPECT_EQ(a.replicates_csv(), b.replicates_csv());
  EXPECT_EQ(a.aggregate_json, b.aggregate_json);
  EXPECT_TRUE(a.conditions_passed);
  for (std::size_t i = 0; i < a.replicates.size(); ++i) {
    EXPECT_EQ(a.replicates[i].seed, replicate_seed(99, i));
  }

  const auto dir = std::filesystem::temp_directory_path() / "asclt_harness_test";
  std::filesystem::remove_all(dir);
  a.write(dir.string());
  EXPECT_EQ(slurp(dir / "replicates.csv"), a.replicates_csv());
  EXPECT_EQ(slurp(dir / "aggregate.json"), a.aggregate_json);
  EXPECT_TRUE(std::filesystem::exists(dir / "conditions.json"));
  const std::string table = render_report(a.aggregate_json);
  EXPECT_NE(table.find("experiment"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Run, EveryExperimentKindRuns) {
  ExperimentConfig c = parse_config(kSmall);
  c.replicates = 20;
  c.horizon = 200.0;
  c.tolerances.lil_t_lo = 50.0;
  c.tolerances.lil_t_hi = 200.0;
  for (ExperimentKind k : {ExperimentKind::kAsclt, ExperimentKind::kCltLfq, ExperimentKind::kLil,
                           ExperimentKind::kConditions}) {
    c.experiment = k;
    const AggregateReport r = run_experiment(c, 1);
    EXPECT_FALSE(r.aggregate_json.empty()) << experiment_kind_name(k);
  }
}

TEST(Config, CltNeedsTwentyReplicates) {
  ExperimentConfig c = parse_config(kSmall);
  c.experiment = ExperimentKind::kCltLfq;
  EXPECT_THROW(c.validate(), Error);
  c.replicates = 20;
  EXPECT_NO_THROW(c.validate());
}

TEST(Run, ConditionsFailureIsReported) {
  // A normalizer that stops growing violates the divergence condition.
  ExperimentConfig c = parse_config(kSmall);
  c.family.type = "power_diag";
  c.family.betas = {0.0};
  try {
    run_experiment(c, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kConditionsFailed || e.code() == ErrorCode::kConfigInvalid);
  }
}

TEST(Run, MatrixTargetFollowsFamily) {
  // power_diag(1, 2): V^{-1} <M> V^{-T} tends to diag(sigma^2, 0), not sigma^2 I;
  // at t = 1000 the target tr(C) / 2 is 0.4999995.
  ExperimentConfig c = parse_config(kSmall);
  c.model = LevyModel{};
  c.model.gaussian_vol = 1.0;
  c.family.type = "power_diag";
  c.family.dim = 2;
  c.family.betas = {1.0, 2.0};
  c.horizon = 1000.0;
  c.replicates = 40;
  const AggregateReport r = run_experiment(c, 1);
  double d00 = 0.0, d11 = 0.0;
  for (const ReplicateReport& rep : r.replicates) {
    for (const ReplicateValue& v : rep.values) {
      if (v.kind == "lfq_00") d00 += v.value / 40.0;
      if (v.kind == "lfq_11") d11 += v.value / 40.0;
    }
  }
  EXPECT_NEAR(d00, 1.0, 0.25);
  // E lfq_11 = int_0^T t (1+t)^{-3} dt / log(1+T), about 1/(2 log(1+T)).
  EXPECT_NEAR(d11, 0.5 / std::log1p(1000.0), 0.02);
  EXPECT_NE(r.aggregate_json.find("\"terminal\": 0.49999"), std::string::npos);

  c.family.betas = {0.5, 2.0};
  EXPECT_THROW(c.validate(), Error);
}

TEST(Summary, CltOnSyntheticGaussian) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, std::sqrt(2.0));
  std::vector<double> x(500);
  for (double& v : x) v = g(rng);
  const CltSummary s = summarize_clt(x, 2.0);
  EXPECT_NEAR(s.variance_est / 2.0, 1.0, 0.3);
  EXPECT_FALSE(s.ad_reject);
  const CltSummary wrong = summarize_clt(x, 8.0);
  EXPECT_TRUE(wrong.ad_reject);
}

}  // namespace
}  // namespace asclt
