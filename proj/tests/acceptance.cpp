// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// only when a hard criterion fails; the LIL criterion is a soft gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "asclt/error.hpp"
#include "asclt/estimators.hpp"
#include "asclt/harness.hpp"
#include "asclt/linalg.hpp"
#include "asclt/quadrature.hpp"
#include "asclt/stattests.hpp"
#include "fixtures.hpp"

namespace {

using namespace asclt;
using Clock = std::chrono::steady_clock;

enum class Gate { kHard, kSoft };

struct Outcome {
  bool passed = false;
  std::string detail;
};

int g_hard_failures = 0;

void report(int id, Gate gate, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const char* tag = o.passed ? "PASS" : (gate == Gate::kSoft ? "SOFT-FAIL" : "FAIL");
  if (!o.passed && gate == Gate::kHard) ++g_hard_failures;
  std::printf("[%s] criterion %d: %s (%.1f s)\n", tag, id, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> collect(const AggregateReport& r, const std::string& kind) {
  std::vector<double> out;
  for (const ReplicateReport& rep : r.replicates) {
    for (const ReplicateValue& v : rep.values) {
      if (v.kind == kind) out.push_back(v.value);
    }
  }
  return out;
}

ExperimentConfig base_config(ExperimentKind kind, std::size_t replicates, std::uint64_t seed) {
  ExperimentConfig c;
  c.model.gaussian_vol = 1.0;
  c.family.type = "weighted_exp";
  c.family.alpha = 0.5;
  c.horizon = 1e4;
  c.step = 0.01;
  c.replicates = replicates;
  c.base_seed = seed;
  c.eval_times = {1e4, 10.0, 1};
  c.experiment = kind;
  return c;
}

LevyModel jump_model() {
  LevyModel m;
  m.gaussian_vol = 0.5;
  m.jump_intensity = 1.5;
  m.jump = NormalJump{0.0, std::sqrt(0.5)};
  return m;
}

Outcome lyapunov() {
  std::mt19937_64 rng(20260101);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(1, 5);
  double worst = 0.0;
  bool pd = true;
  const auto t0 = Clock::now();
  for (int k = 0; k < 100; ++k) {
    const int d = dim(rng);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    const Eigen::MatrixXd s = a + a.transpose();
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s).eigenvalues().minCoeff();
    const double shift = std::max(0.0, -0.5 * lo) + 0.1;
    const SquareMatrix u(a + shift * Eigen::MatrixXd::Identity(d, d));
    const SymmetricMatrix r = lyapunov_solve(u);
    worst = std::max(worst, lyapunov_residual(r, u));
    const double rmin =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r.matrix()).eigenvalues().minCoeff();
    pd = pd && rmin > 0.0 && (r.matrix() - r.matrix().transpose()).norm() == 0.0;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {worst <= 1e-10 && pd && secs < 1.0,
          fmt("max residual %.2e", worst) + (pd ? ", R symmetric PD" : ", R not PD") +
              fmt(", %.3f s", secs)};
}

Outcome logdet() {
  const std::vector<NormalizationFamily> fams{sqrt_scalar(), power_diag({1.0, 2.0}),
                                              asclt::testing::triangular_family()};
  double worst = 0.0;
  for (const auto& f : fams) worst = std::max(worst, logdet_identity_residual(f, 100.0, 0.01));
  return {worst <= 1e-6, fmt("max residual %.2e (threshold 1e-6)", worst)};
}

Outcome equiv() {
  const std::vector<NormalizationFamily> fams{
      sqrt_scalar(), power_diag({1.0, 2.0}), weighted_exp(0.5),
      weighted_exp_prefactor(0.5, false), weighted_exp_prefactor(0.5, true)};
  const double t = 1e6;
  double worst = 0.0;
  std::string names;
  for (const auto& f : fams) {
    const double ratio = f.log_det_sq(t) / (f.primitive(t) * f.s_matrix().matrix().trace());
    worst = std::max(worst, std::abs(ratio - 1.0));
    names += (names.empty() ? "" : ",") + f.name + fmt("=%.5f", ratio);
  }
  return {worst <= 0.02, fmt("max |ratio-1| %.4f: ", worst) + names};
}

Outcome asclt_measure() {
  double worst_frac = 1.0;
  std::string detail;
  const std::vector<LevyModel> models{base_config(ExperimentKind::kAsclt, 1, 1).model,
                                      jump_model()};
  for (std::size_t k = 0; k < models.size(); ++k) {
    ExperimentConfig c = base_config(ExperimentKind::kAsclt, 50, 4000 + k);
    c.model = models[k];
    const AggregateReport r = run_experiment(c, workers());
    const std::vector<double> ks = collect(r, "ks");
    const double frac =
        static_cast<double>(std::count_if(ks.begin(), ks.end(), [](double d) { return d <= 0.15; })) /
        static_cast<double>(ks.size());
    worst_frac = std::min(worst_frac, frac);
    detail += fmt(k == 0 ? "pure Brownian pass fraction %.2f" : ", jump model %.2f", frac);
    detail += fmt(" (worst KS %.3f)", *std::max_element(ks.begin(), ks.end()));
  }
  return {worst_frac >= 0.8, detail};
}

Outcome lfq_consistency() {
  ExperimentConfig t = base_config(ExperimentKind::kLfqConsistency, 200, 5000);
  t.estimator = EstimatorKind::kSigmaTilde;
  const MomentSummary mt = moment_summary(collect(run_experiment(t, workers()), "terminal"));

  ExperimentConfig h = base_config(ExperimentKind::kLfqConsistency, 200, 5001);
  h.family.type = "sqrt_scalar";
  h.estimator = EstimatorKind::kSigmaHat;
  const MomentSummary mh = moment_summary(collect(run_experiment(h, workers()), "terminal"));

  const bool ok = std::abs(mt.mean - 1.0) <= 0.05 && std::abs(mh.mean - 1.0) <= 0.25;
  return {ok, fmt("sigma_tilde mean %.4f (tol 0.05)", mt.mean) +
                  fmt(", sigma_hat^2 mean %.4f (tol 0.25)", mh.mean)};
}

Outcome clt() {
  const ExperimentConfig c = base_config(ExperimentKind::kCltLfq, 500, 6000);
  const std::vector<double> stats = collect(run_experiment(c, workers()), "clt_stat");
  const double target = clt_target_variance(1.0, RateKind::kPoly, 0.5);
  const CltSummary s = summarize_clt(stats, target);
  const bool ok = std::abs(s.variance_est / target - 1.0) <= 0.3 && !s.ad_reject;

  // Log-rate statistic: reported only.
  ExperimentConfig l = c;
  l.family.type = "sqrt_scalar";
  l.replicates = 100;
  const std::vector<double> ls = collect(run_experiment(l, workers()), "clt_stat");
  const MomentSummary lm = moment_summary(ls);

  return {ok, fmt("poly-rate variance %.3f", s.variance_est) + fmt(" vs 2 (ratio %.3f)", s.variance_est / target) +
                  fmt(", AD %.3f", s.ad_statistic) + " (1% critical 3.857)" +
                  fmt("; log-rate variance %.3f vs 4, not gated", lm.variance)};
}

Outcome lil() {
  std::string detail;
  bool ok = true;
  for (const char* fam : {"weighted_exp", "sqrt_scalar"}) {
    ExperimentConfig c = base_config(ExperimentKind::kLil, 50, 7000);
    c.family.type = fam;
    const std::vector<double> sups = collect(run_experiment(c, workers()), "lil_sup");
    const double bound = 1.0;          // 2 eta C with eta = 1/2, C = 1
    const double asymptotic = 2.0;     // 2 C
    auto frac_over = [&](double b) {
      return static_cast<double>(
                 std::count_if(sups.begin(), sups.end(), [&](double s) { return s > 1.5 * b; })) /
             static_cast<double>(sups.size());
    };
    const double f = frac_over(bound);
    ok = ok && f <= 0.1;
    detail += std::string(detail.empty() ? "" : "; ") + fam +
              fmt(": over 1.5x bound %.2f", f) + fmt(", over 1.5x 2C %.2f", frac_over(asymptotic));
  }
  return {ok, detail + " (soft gate, limit 0.10)"};
}

Outcome lindeberg() {
  LevyModel m;
  m.gaussian_vol = 0.0;
  m.jump_intensity = 1.0;
  m.jump = NormalJump{0.0, 1.0};
  const NormalizationFamily f = sqrt_scalar();
  const double delta = 0.1;
  std::vector<double> vals;
  double worst_rel = 0.0;
  for (double t : {1e2, 1e3, 1e4}) {
    const double d = lindeberg_diagnostic(m, f, t, delta);
    vals.push_back(d);
    const double c = delta * std::sqrt(1.0 + t);
    const auto integrand = [](double x) {
      return x * x * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    };
    const double tail = 2.0 * adaptive_simpson(integrand, c, c + 40.0, 1e-13);
    const double numeric = m.jump_intensity * t / (1.0 + t) * tail;
    worst_rel = std::max(worst_rel, std::abs(d - numeric) / numeric);
  }
  const bool mono = vals[0] > vals[1] && vals[1] > vals[2];
  const bool ok = mono && vals[2] < 1e-6 && worst_rel <= 1e-8;
  return {ok, fmt("values %.3e", vals[0]) + fmt(", %.3e", vals[1]) + fmt(", %.3e", vals[2]) +
                  fmt("; analytic vs quadrature rel err %.1e", worst_rel)};
}

Outcome oracles() {
  Rng rng(9000);
  LevyModel m = jump_model();
  m.drift = 0.2;
  const SamplePath p = simulate_path(m, 100.0, 0.01, rng);
  const Weight w = exp_weight(0.5);
  const WeightedPath coarse = weighted_integral(p, m, w);
  const SamplePath fine = refine_path(p, 100, m.gaussian_vol, rng);
  const double rs = asclt::testing::riemann_stieltjes_scaled(fine, m.mean_rate(), w);
  const double rel = std::abs(coarse.z.back() - rs) / std::abs(rs);

  Rng rng2(9001);
  const SamplePath q = simulate_path(m, 1e4, 0.01, rng2);
  const std::vector<double> t{1e2, 1e3, 1e4};
  const EstimatorSeries a = sigma2_hat(q, m.mean_rate(), t);
  const EstimatorSeries b =
      matrix_lfq(std::span<const SamplePath>(&q, 1), {m.mean_rate()}, sqrt_scalar(), t);
  double diff = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) diff = std::max(diff, std::abs(a.scalar(k) - b.scalar(k)));
  return {rel <= 1e-3 && diff <= 1e-6,
          fmt("weighted integral rel err %.2e", rel) + fmt(", matrix_lfq vs sigma_hat^2 %.2e", diff)};
}

Outcome determinism() {
  ExperimentConfig c = base_config(ExperimentKind::kLfqConsistency, 12, 10000);
  c.model = jump_model();
  c.horizon = 1000.0;
  c.eval_times = {10.0, 10.0, 3};
  bool same = true;
  const AggregateReport ref = run_experiment(c, 1);
  for (unsigned th : {2u, 4u, 8u}) {
    const AggregateReport r = run_experiment(c, th);
    same = same && r.replicates_csv() == ref.replicates_csv() &&
           r.aggregate_json == ref.aggregate_json;
  }
  return {same, same ? "byte-identical outputs for 1, 2, 4 and 8 workers"
                     : "outputs differ across worker counts"};
}

}  // namespace

int main() {
  report(1, Gate::kHard, lyapunov);
  report(2, Gate::kHard, logdet);
  report(3, Gate::kHard, equiv);
  report(4, Gate::kHard, asclt_measure);
  report(5, Gate::kHard, lfq_consistency);
  report(6, Gate::kHard, clt);
  report(7, Gate::kSoft, lil);
  report(8, Gate::kHard, lindeberg);
  report(9, Gate::kHard, oracles);
  report(10, Gate::kHard, determinism);
  std::printf("%d hard criteria failed\n", g_hard_failures);
  return g_hard_failures == 0 ? 0 : 1;
}
