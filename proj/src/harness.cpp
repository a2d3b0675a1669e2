// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "asclt/empirical_measure.hpp"
#include "asclt/error.hpp"
#include "asclt/estimators.hpp"
#include "asclt/quadrature.hpp"
#include "asclt/stattests.hpp"

namespace asclt {

using Json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Config I/O

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kConfigInvalid, msg);
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) invalid(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    invalid(where + "." + key + ": " + e.what());
  }
}

Json jump_to_json(const JumpDistribution& jump) {
  return std::visit(
      [](const auto& j) -> Json {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, NormalJump>) {
          return {{"type", "normal"}, {"mean", j.mean}, {"sd", j.sd}};
        } else if constexpr (std::is_same_v<T, UniformJump>) {
          return {{"type", "uniform"}, {"lo", j.lo}, {"hi", j.hi}};
        } else {
          return {{"type", "discrete"}, {"points", j.points}, {"probs", j.probs}};
        }
      },
      jump);
}

JumpDistribution jump_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type")) invalid("model.jump needs a type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "normal") {
    reject_unknown(j, {"type", "mean", "sd"}, "model.jump");
    NormalJump n;
    read(j, "mean", n.mean, "model.jump");
    read(j, "sd", n.sd, "model.jump");
    return n;
  }
  if (type == "uniform") {
    reject_unknown(j, {"type", "lo", "hi"}, "model.jump");
    UniformJump u;
    read(j, "lo", u.lo, "model.jump");
    read(j, "hi", u.hi, "model.jump");
    return u;
  }
  if (type == "discrete") {
    reject_unknown(j, {"type", "points", "probs"}, "model.jump");
    DiscreteJump d;
    read(j, "points", d.points, "model.jump");
    read(j, "probs", d.probs, "model.jump");
    return d;
  }
  invalid("unknown jump type '" + type + "'");
}

const char* estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::kAuto: return "auto";
    case EstimatorKind::kSigmaHat: return "sigma_hat";
    case EstimatorKind::kSigmaTilde: return "sigma_tilde";
    case EstimatorKind::kMatrixLfq: return "matrix_lfq";
  }
  return "auto";
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "auto") return EstimatorKind::kAuto;
  if (s == "sigma_hat") return EstimatorKind::kSigmaHat;
  if (s == "sigma_tilde") return EstimatorKind::kSigmaTilde;
  if (s == "matrix_lfq") return EstimatorKind::kMatrixLfq;
  invalid("unknown estimator '" + s + "'");
}

Json to_json_value(const ExperimentConfig& c) {
  const Tolerances& t = c.tolerances;
  Json j;
  j["model"] = {{"drift", c.model.drift},
                {"gaussian_vol", c.model.gaussian_vol},
                {"jump_intensity", c.model.jump_intensity},
                {"jump", jump_to_json(c.model.jump)}};
  j["family"] = {{"type", c.family.type},
                 {"dim", c.family.dim},
                 {"betas", c.family.betas},
                 {"alpha", c.family.alpha}};
  j["horizon"] = c.horizon;
  j["step"] = c.step;
  j["replicates"] = c.replicates;
  j["base_seed"] = c.base_seed;
  j["eval_times"] = {{"t0", c.eval_times.t0},
                     {"ratio", c.eval_times.ratio},
                     {"count", c.eval_times.count}};
  j["experiment"] = experiment_kind_name(c.experiment);
  j["estimator"] = estimator_name(c.estimator);
  j["tolerances"] = {{"ks_max", t.ks_max},
                     {"ks_pass_fraction", t.ks_pass_fraction},
                     {"mean_tol", t.mean_tol},
                     {"var_rel_tol", t.var_rel_tol},
                     {"lil_slack", t.lil_slack},
                     {"lil_t_lo", t.lil_t_lo},
                     {"lil_t_hi", t.lil_t_hi},
                     {"lil_max_violation_fraction", t.lil_max_violation_fraction},
                     {"lil_stride", t.lil_stride},
                     {"subsample", t.subsample}};
  j["output"] = c.output;
  return j;
}

bool is_weighted(const FamilySpec& f) {
  return f.type == "weighted_exp" || f.type == "weighted_exp_prefactor";
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  os << text;
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir.empty() ? "." : dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + p.string() + ": " + ec.message());
  return p;
}

// ---------------------------------------------------------------------------
// Parallel fan-out keyed by index

template <class R, class F>
std::vector<R> run_indexed(std::size_t n, unsigned threads, F&& fn) {
  std::vector<R> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Shared state of one run

struct RunContext {
  const ExperimentConfig& config;
  NormalizationFamily family;
  std::shared_ptr<const TimeGrid> grid;
  std::optional<WeightTable> table;
  double sigma2 = 0.0;
  double mean = 0.0;
  std::size_t dim = 1;

  explicit RunContext(const ExperimentConfig& c)
      : config(c), family(make_family(c.family)) {
    grid = std::make_shared<const TimeGrid>(c.horizon, c.step);
    sigma2 = c.model.variance_rate();
    mean = c.model.mean_rate();
    dim = static_cast<std::size_t>(family.dim);
    if (is_weighted(c.family)) {
      const Weight w = c.family.type == "weighted_exp"
                           ? exp_weight(c.family.alpha)
                           : exp_weight(c.family.alpha, family.scalar->log_v,
                                        "exp_prefactor_normalizer");
      table = make_weight_table(grid, w);
    }
  }

  std::vector<SamplePath> paths(std::uint64_t seed) const {
    std::vector<SamplePath> out;
    out.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      Rng rng(k == 0 ? seed : replicate_seed(seed, k));
      out.push_back(simulate_path(config.model, grid, rng));
      out.back().seed_tag = seed;
    }
    return out;
  }

  std::vector<double> means() const { return std::vector<double>(dim, mean); }

  // Limit of V_t^{-1} <M>_t V_t^{-T}; non-scalar families use its value at the horizon.
  SymmetricMatrix c_matrix() const {
    if (family.is_scalar()) {
      return SymmetricMatrix(Eigen::MatrixXd(
          sigma2 * Eigen::MatrixXd::Identity(family.dim, family.dim)));
    }
    const double t = config.horizon;
    const Eigen::MatrixXd v_inv = family.value(t).inverse();
    return SymmetricMatrix(Eigen::MatrixXd(sigma2 * t * v_inv * v_inv.transpose()));
  }

  double lfq_target() const {
    return family.is_scalar() ? sigma2
                              : c_matrix().matrix().trace() / static_cast<double>(dim);
  }
};

const std::vector<double> kCfGrid{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};

// Terminal value of the resolved estimator plus its whole series.
struct EstimateOut {
  EstimatorSeries series;
  double terminal = 0.0;
};

EstimateOut estimate(const RunContext& ctx, std::span<const SamplePath> paths,
                     const std::vector<double>& times) {
  EstimateOut out;
  switch (ctx.config.resolved_estimator()) {
    case EstimatorKind::kSigmaTilde: {
      const WeightedPath wp = weighted_integral(paths[0], ctx.config.model, *ctx.table);
      out.series = sigma2_tilde(wp, ctx.config.family.alpha, times);
      break;
    }
    case EstimatorKind::kSigmaHat:
      out.series = sigma2_hat(paths[0], ctx.mean, times);
      break;
    default:
      out.series = matrix_lfq(paths, ctx.means(), ctx.family, times);
      break;
  }
  const std::size_t k = out.series.size() - 1;
  out.terminal = ctx.config.resolved_estimator() == EstimatorKind::kMatrixLfq
                     ? out.series.matrix(k).trace() / static_cast<double>(ctx.dim)
                     : out.series.scalar(k);
  return out;
}

std::vector<double> with_horizon(std::vector<double> times, double horizon) {
  if (times.empty() || times.back() < horizon * (1.0 - 1e-12)) times.push_back(horizon);
  return times;
}

ReplicateReport run_replicate(const RunContext& ctx, std::size_t index) {
  const ExperimentConfig& cfg = ctx.config;
  ReplicateReport rep;
  rep.index = index;
  rep.seed = replicate_seed(cfg.base_seed, index);
  const std::vector<SamplePath> paths = ctx.paths(rep.seed);
  const double horizon = cfg.horizon;
  const Tolerances& tol = cfg.tolerances;

  switch (cfg.experiment) {
    case ExperimentKind::kAsclt: {
      double ks = 0.0, cf = 0.0;
      if (ctx.table) {
        const WeightedPath wp = weighted_integral(paths[0], cfg.model, *ctx.table);
        const EmpiricalMeasure m = log_empirical_measure(wp, horizon, tol.subsample);
        ks = ks_distance(m, ctx.sigma2);
        cf = cf_distance(m, ctx.sigma2, kCfGrid);
      } else {
        const EmpiricalMeasure m =
            log_empirical_measure(paths, ctx.means(), ctx.family, horizon, tol.subsample);
        for (std::size_t k = 0; k < ctx.dim; ++k) {
          const EmpiricalMeasure mk = m.marginal(k);
          const double ks_k = ks_distance(mk, ctx.sigma2);
          if (ctx.dim > 1) rep.values.push_back({horizon, "ks_" + std::to_string(k), ks_k});
          ks = std::max(ks, ks_k);
          cf = std::max(cf, cf_distance(mk, ctx.sigma2, kCfGrid));
        }
      }
      rep.values.push_back({horizon, "ks", ks});
      rep.values.push_back({horizon, "cf", cf});
      break;
    }
    case ExperimentKind::kLfqConsistency: {
      const EstimateOut est = estimate(ctx, paths, with_horizon(cfg.eval_time_list(), horizon));
      const char* kind = series_kind_name(est.series.kind);
      for (std::size_t k = 0; k < est.series.size(); ++k) {
        if (est.series.value_dim == 1) {
          rep.values.push_back({est.series.eval_times[k], kind, est.series.scalar(k)});
        }
      }
      if (est.series.value_dim > 1) {
        const Eigen::MatrixXd last = est.series.matrix(est.series.size() - 1);
        for (Eigen::Index r = 0; r < last.rows(); ++r) {
          for (Eigen::Index c = 0; c < last.cols(); ++c) {
            rep.values.push_back({horizon,
                                  "lfq_" + std::to_string(r) + std::to_string(c),
                                  last(r, c)});
          }
        }
      }
      rep.values.push_back({horizon, "terminal", est.terminal});
      break;
    }
    case ExperimentKind::kCltLfq: {
      const EstimatorKind ek = cfg.resolved_estimator();
      double stat;
      if (ek == EstimatorKind::kMatrixLfq) {
        stat = matrix_clt_statistic(paths, ctx.means(), ctx.family, ctx.c_matrix(), horizon)
                   .statistic;
      } else {
        const EstimateOut est = estimate(ctx, paths, {horizon});
        const RateKind rate = ek == EstimatorKind::kSigmaTilde ? RateKind::kPoly : RateKind::kLog;
        rep.values.push_back({horizon, series_kind_name(est.series.kind), est.terminal});
        stat = clt_statistic(est.series, ctx.sigma2, est.series.eval_times.back(), rate,
                             cfg.family.alpha);
      }
      rep.values.push_back({horizon, "clt_stat", stat});
      break;
    }
    case ExperimentKind::kLil: {
      const double hi = std::min(tol.lil_t_hi, horizon);
      double sup;
      if (ctx.table) {
        const WeightedPath wp = weighted_integral(paths[0], cfg.model, *ctx.table);
        sup = lil_sup(wp, ctx.sigma2, tol.lil_t_lo, hi, tol.lil_stride);
      } else if (ctx.dim == 1) {
        sup = lil_sup(paths[0], ctx.mean, ctx.family, ctx.sigma2, tol.lil_t_lo, hi,
                      tol.lil_stride);
      } else {
        const EstimatorSeries s = lil_statistic(paths, ctx.means(), ctx.family,
                                                ctx.c_matrix(), cfg.eval_time_list());
        sup = 0.0;
        for (double v : s.values) sup = std::max(sup, std::abs(v));
      }
      rep.values.push_back({hi, "lil_sup", sup});
      break;
    }
    case ExperimentKind::kConditions:
      break;
  }
  for (const ReplicateValue& v : rep.values) {
    if (!std::isfinite(v.value)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "replicate " + std::to_string(index) + " produced a non-finite " + v.kind);
    }
  }
  return rep;
}

std::vector<double> collect(const std::vector<ReplicateReport>& reps, const std::string& kind) {
  std::vector<double> out;
  out.reserve(reps.size());
  for (const ReplicateReport& r : reps) {
    for (const ReplicateValue& v : r.values) {
      if (v.kind == kind) out.push_back(v.value);
    }
  }
  return out;
}

Json moments_json(std::span<const double> xs) {
  const MomentSummary m = moment_summary(xs);
  return {{"n", m.n},
          {"mean", m.mean},
          {"se_mean", m.se_mean},
          {"variance", m.variance},
          {"skewness", m.skewness},
          {"excess_kurtosis", m.excess_kurtosis}};
}

// Fills `agg` and returns (gated, passed).
std::pair<bool, bool> aggregate(const RunContext& ctx,
                                const std::vector<ReplicateReport>& reps, Json& agg) {
  const ExperimentConfig& cfg = ctx.config;
  const Tolerances& tol = cfg.tolerances;
  const double s2 = ctx.sigma2;
  switch (cfg.experiment) {
    case ExperimentKind::kAsclt: {
      const std::vector<double> ks = collect(reps, "ks");
      const std::vector<double> cf = collect(reps, "cf");
      const auto hits = std::count_if(ks.begin(), ks.end(),
                                      [&](double v) { return v <= tol.ks_max; });
      const double frac = static_cast<double>(hits) / static_cast<double>(ks.size());
      agg["target"] = {{"variance", s2}, {"ks_max", tol.ks_max},
                       {"required_pass_fraction", tol.ks_pass_fraction}};
      agg["estimates"] = {{"ks_pass_fraction", frac},
                          {"ks", moments_json(ks)},
                          {"ks_worst", *std::max_element(ks.begin(), ks.end())},
                          {"cf", moments_json(cf)}};
      const bool pass = frac >= tol.ks_pass_fraction;
      agg["tests"] = {{"ks_pass_fraction_ok", pass}};
      return {true, pass};
    }
    case ExperimentKind::kLfqConsistency: {
      const std::vector<double> term = collect(reps, "terminal");
      const MomentSummary m = moment_summary(term);
      const double target = ctx.lfq_target();
      agg["target"] = {{"sigma2", s2}, {"terminal", target}, {"mean_tol", tol.mean_tol}};
      agg["estimates"] = {{"estimator", estimator_name(cfg.resolved_estimator())},
                          {"terminal", moments_json(term)}};
      bool pass = std::abs(m.mean - target) <= tol.mean_tol;
      Json tests = {{"mean_within_tol", pass}, {"abs_error", std::abs(m.mean - target)}};
      if (ctx.dim > 1) {
        Json off = Json::array();
        bool off_ok = true;
        for (std::size_t r = 0; r < ctx.dim; ++r) {
          for (std::size_t c = r + 1; c < ctx.dim; ++c) {
            const std::vector<double> v =
                collect(reps, "lfq_" + std::to_string(r) + std::to_string(c));
            const MomentSummary mv = moment_summary(v);
            const bool ok = std::abs(mv.mean) <= 3.0 * mv.se_mean;
            off_ok = off_ok && ok;
            off.push_back({{"entry", std::to_string(r) + std::to_string(c)},
                           {"mean", mv.mean}, {"se", mv.se_mean}, {"within_3se", ok}});
          }
        }
        tests["off_diagonal"] = off;
        tests["off_diagonal_ok"] = off_ok;
        pass = pass && off_ok;
      }
      agg["tests"] = tests;
      return {true, pass};
    }
    case ExperimentKind::kCltLfq: {
      const std::vector<double> stats = collect(reps, "clt_stat");
      const EstimatorKind ek = cfg.resolved_estimator();
      const double eta = 0.5;
      double target;
      bool gated;
      if (ek == EstimatorKind::kSigmaTilde) {
        target = clt_target_variance(s2, RateKind::kPoly, cfg.family.alpha);
        gated = true;
      } else if (ek == EstimatorKind::kSigmaHat) {
        target = clt_target_variance(s2, RateKind::kLog);
        gated = false;
      } else {
        const MatrixCltResult k = matrix_clt_constants(ctx.family.limit, ctx.c_matrix());
        target = k.target_std * k.target_std;
        gated = false;
      }
      const CltSummary s = summarize_clt(stats, target);
      const MatrixCltResult k1 = matrix_clt_constants(
          ctx.family.limit, ctx.c_matrix());
      agg["target"] = {{"variance", target},
                       {"rate", ek == EstimatorKind::kSigmaTilde ? "poly" : "log"},
                       {"var_rel_tol", tol.var_rel_tol}};
      agg["constants"] = {{"application_std", std::sqrt(target)},
                          {"matrix_formula_std", k1.target_std},
                          {"scalar_theorem_std", 2.0 * eta * s2}};
      agg["estimates"] = {{"variance", s.variance_est},
                          {"variance_ratio", s.variance_est / target},
                          {"mean", s.mean},
                          {"skewness", s.skewness},
                          {"excess_kurtosis", s.excess_kurtosis}};
      const bool var_ok = std::abs(s.variance_est / target - 1.0) <= tol.var_rel_tol;
      agg["tests"] = {{"variance_within_tol", var_ok},
                      {"ad_statistic", s.ad_statistic},
                      {"ad_reject_1pct", s.ad_reject},
                      {"ks_statistic", s.ks_statistic},
                      {"ks_p", s.ks_p}};
      return {gated, var_ok && !s.ad_reject};
    }
    case ExperimentKind::kLil: {
      const std::vector<double> sups = collect(reps, "lil_sup");
      const MatrixCltResult k = matrix_clt_constants(ctx.family.limit, ctx.c_matrix());
      const double bound = ctx.family.is_scalar() && ctx.dim == 1
                               ? k.scalar_bound
                               : std::sqrt(k.trace_s * k.trace_chat_rcr);
      const auto over = [&](double b) {
        const auto c = std::count_if(sups.begin(), sups.end(),
                                     [&](double v) { return v > tol.lil_slack * b; });
        return static_cast<double>(c) / static_cast<double>(sups.size());
      };
      const double frac = over(bound);
      agg["target"] = {{"bound", bound},
                       {"slack", tol.lil_slack},
                       {"max_violation_fraction", tol.lil_max_violation_fraction},
                       {"t_lo", tol.lil_t_lo},
                       {"t_hi", std::min(tol.lil_t_hi, cfg.horizon)}};
      agg["estimates"] = {{"sup", moments_json(sups)},
                          {"sup_worst", *std::max_element(sups.begin(), sups.end())},
                          {"violation_fraction", frac},
                          {"asymptotic_constant", k.target_std},
                          {"violation_fraction_vs_asymptotic_constant", over(k.target_std)}};
      const bool pass = frac <= tol.lil_max_violation_fraction;
      agg["tests"] = {{"violation_fraction_ok", pass}};
      return {true, pass};
    }
    case ExperimentKind::kConditions:
      break;
  }
  return {true, true};
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API

const char* experiment_kind_name(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::kAsclt: return "asclt";
    case ExperimentKind::kLfqConsistency: return "lfq_consistency";
    case ExperimentKind::kCltLfq: return "clt_lfq";
    case ExperimentKind::kLil: return "lil";
    case ExperimentKind::kConditions: return "conditions";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::kAsclt, ExperimentKind::kLfqConsistency,
                           ExperimentKind::kCltLfq, ExperimentKind::kLil,
                           ExperimentKind::kConditions}) {
    if (name == experiment_kind_name(k)) return k;
  }
  invalid("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const Error& e) {
    invalid(std::string("model: ") + e.what());
  }
  if (!(model.variance_rate() > 0.0)) invalid("degenerate model: sigma^2 = 0");
  if (replicates < 1) invalid("replicates must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) invalid("horizon must be > 0");
  if (!(step > 0.0) || step > horizon / 100.0) invalid("step must be in (0, horizon / 100]");
  if (!(eval_times.t0 > 0.0) || !(eval_times.ratio > 1.0) || eval_times.count < 1) {
    invalid("eval_times needs t0 > 0, ratio > 1, count >= 1");
  }
  if (eval_time_list().back() > horizon * (1.0 + 1e-12)) {
    invalid("eval_times extend beyond the horizon");
  }
  if (tolerances.subsample < 1) invalid("tolerances.subsample must be >= 1");
  if (tolerances.lil_stride < 1) invalid("tolerances.lil_stride must be >= 1");
  if (experiment == ExperimentKind::kCltLfq && replicates < 20) {
    invalid("clt_lfq needs at least 20 replicates for the normality tests");
  }
  if (experiment == ExperimentKind::kLil &&
      !(tolerances.lil_t_lo < std::min(tolerances.lil_t_hi, horizon))) {
    invalid("lil range is empty");
  }
  if (family.type == "power_diag") {
    for (double b : family.betas) {
      if (b < 1.0) invalid("power_diag exponents below 1 make V^{-1} <M> V^{-T} diverge");
    }
  }
  try {
    (void)make_family(family);
  } catch (const Error& e) {
    invalid(std::string("family: ") + e.what());
  }
  const EstimatorKind ek = resolved_estimator();
  if (ek == EstimatorKind::kSigmaTilde && family.type != "weighted_exp") {
    invalid("sigma_tilde needs the weighted_exp family");
  }
  if (ek == EstimatorKind::kSigmaHat && family.dim != 1) {
    invalid("sigma_hat is one-dimensional");
  }
}

std::vector<double> ExperimentConfig::eval_time_list() const {
  return geometric_grid(eval_times.t0, eval_times.ratio, eval_times.count);
}

EstimatorKind ExperimentConfig::resolved_estimator() const {
  if (estimator != EstimatorKind::kAuto) return estimator;
  if (family.type == "weighted_exp") return EstimatorKind::kSigmaTilde;
  if (family.type == "sqrt_scalar" && family.dim == 1) return EstimatorKind::kSigmaHat;
  return EstimatorKind::kMatrixLfq;
}

ExperimentConfig parse_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(j, {"model", "family", "horizon", "step", "replicates", "base_seed",
                     "eval_times", "experiment", "estimator", "tolerances", "output"},
                 "config");
  ExperimentConfig c;
  if (j.contains("model")) {
    const Json& m = j.at("model");
    reject_unknown(m, {"drift", "gaussian_vol", "jump_intensity", "jump"}, "model");
    read(m, "drift", c.model.drift, "model");
    read(m, "gaussian_vol", c.model.gaussian_vol, "model");
    read(m, "jump_intensity", c.model.jump_intensity, "model");
    if (m.contains("jump")) c.model.jump = jump_from_json(m.at("jump"));
  }
  if (j.contains("family")) {
    const Json& f = j.at("family");
    reject_unknown(f, {"type", "dim", "betas", "alpha"}, "family");
    read(f, "type", c.family.type, "family");
    read(f, "dim", c.family.dim, "family");
    read(f, "betas", c.family.betas, "family");
    read(f, "alpha", c.family.alpha, "family");
    if (c.family.type == "power_diag" && !f.contains("dim")) {
      c.family.dim = c.family.betas.size();
    }
  }
  read(j, "horizon", c.horizon, "config");
  read(j, "step", c.step, "config");
  read(j, "replicates", c.replicates, "config");
  read(j, "base_seed", c.base_seed, "config");
  if (j.contains("eval_times")) {
    const Json& e = j.at("eval_times");
    reject_unknown(e, {"t0", "ratio", "count"}, "eval_times");
    read(e, "t0", c.eval_times.t0, "eval_times");
    read(e, "ratio", c.eval_times.ratio, "eval_times");
    read(e, "count", c.eval_times.count, "eval_times");
  }
  if (j.contains("experiment")) {
    c.experiment = parse_experiment_kind(j.at("experiment").get<std::string>());
  }
  if (j.contains("estimator")) c.estimator = parse_estimator(j.at("estimator").get<std::string>());
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    reject_unknown(t, {"ks_max", "ks_pass_fraction", "mean_tol", "var_rel_tol", "lil_slack",
                       "lil_t_lo", "lil_t_hi", "lil_max_violation_fraction", "lil_stride",
                       "subsample"},
                   "tolerances");
    Tolerances& o = c.tolerances;
    read(t, "ks_max", o.ks_max, "tolerances");
    read(t, "ks_pass_fraction", o.ks_pass_fraction, "tolerances");
    read(t, "mean_tol", o.mean_tol, "tolerances");
    read(t, "var_rel_tol", o.var_rel_tol, "tolerances");
    read(t, "lil_slack", o.lil_slack, "tolerances");
    read(t, "lil_t_lo", o.lil_t_lo, "tolerances");
    read(t, "lil_t_hi", o.lil_t_hi, "tolerances");
    read(t, "lil_max_violation_fraction", o.lil_max_violation_fraction, "tolerances");
    read(t, "lil_stride", o.lil_stride, "tolerances");
    read(t, "subsample", o.subsample, "tolerances");
  }
  read(j, "output", c.output, "config");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  return to_json_value(config).dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string s = to_json_value(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

NormalizationFamily make_family(const FamilySpec& spec) {
  if (spec.type == "sqrt_scalar") return sqrt_scalar(static_cast<Eigen::Index>(spec.dim));
  if (spec.type == "power_diag") {
    if (spec.betas.size() != spec.dim) {
      throw Error(ErrorCode::kInvalidArgument, "power_diag needs one beta per dimension");
    }
    return power_diag(spec.betas);
  }
  if (spec.dim != 1) {
    throw Error(ErrorCode::kInvalidArgument, spec.type + " is one-dimensional");
  }
  if (spec.type == "weighted_exp") return weighted_exp(spec.alpha);
  if (spec.type == "weighted_exp_prefactor") return weighted_exp_prefactor(spec.alpha);
  throw Error(ErrorCode::kInvalidArgument, "unknown family '" + spec.type + "'");
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ConditionReport family_conditions(const ExperimentConfig& config) {
  const NormalizationFamily family = make_family(config.family);
  const double lo = std::max({1.0, config.eval_times.t0 / 10.0, family.valid_from});
  const double hi = config.horizon;
  constexpr std::size_t kPoints = 40;
  std::vector<double> times(kPoints);
  for (std::size_t k = 0; k < kPoints; ++k) {
    times[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (kPoints - 1));
  }
  times.back() = hi;
  return check_conditions(family, times);
}

CltSummary summarize_clt(std::span<const double> stats, double target_variance) {
  if (!(target_variance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target variance must be > 0");
  }
  const MomentSummary m = moment_summary(stats);
  CltSummary s;
  s.variance_target = target_variance;
  s.variance_est = m.variance;
  s.mean = m.mean;
  s.skewness = m.skewness;
  s.excess_kurtosis = m.excess_kurtosis;
  const AdResult ad = anderson_darling_normal(stats, 0.0, target_variance);
  s.ad_statistic = ad.statistic;
  s.ad_reject = ad.reject_1pct;
  const KsResult ks = ks_test_gaussian(stats, 0.0, target_variance);
  s.ks_statistic = ks.statistic;
  s.ks_p = ks.p_value;
  return s;
}

AggregateReport run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  AggregateReport report;
  report.config = config;
  report.config_hash = config_hash(config);
  const ConditionReport cond = family_conditions(config);
  report.conditions_json = cond.to_json();
  report.conditions_passed = cond.passed();

  Json agg;
  agg["experiment"] = experiment_kind_name(config.experiment);
  agg["config_hash"] = hex64(report.config_hash);
  agg["replicates"] = config.experiment == ExperimentKind::kConditions ? 0 : config.replicates;
  agg["base_seed"] = config.base_seed;
  agg["conditions_passed"] = report.conditions_passed;

  if (config.experiment == ExperimentKind::kConditions) {
    const NormalizationFamily family = make_family(config.family);
    const double t_end = std::min(100.0, config.horizon);
    double residual = -1.0;
    if (std::isfinite(family.log_det_sq(0.0))) {
      residual = logdet_identity_residual(family, t_end, 1e-3);
    }
    agg["estimates"] = {{"equiv_ratio", cond.equiv_ratio},
                        {"delta_tail", cond.delta_tail},
                        {"logdet_identity_residual", residual}};
    agg["tests"] = {{"conditions_passed", report.conditions_passed}};
    report.gated = true;
    report.passed = report.conditions_passed;
  } else {
    if (!report.conditions_passed) {
      throw Error(ErrorCode::kConditionsFailed,
                  "family '" + config.family.type + "' fails its condition check: " +
                      report.conditions_json);
    }
    const RunContext ctx(config);
    report.replicates = run_indexed<ReplicateReport>(
        config.replicates, threads, [&](std::size_t i) { return run_replicate(ctx, i); });
    const auto [gated, passed] = aggregate(ctx, report.replicates, agg);
    report.gated = gated;
    report.passed = passed;
  }
  agg["gated"] = report.gated;
  agg["passed"] = report.passed;
  report.aggregate_json = agg.dump(2) + "\n";
  return report;
}

std::string AggregateReport::replicates_csv() const {
  std::string out = "index,seed,t,kind,value\n";
  for (const ReplicateReport& r : replicates) {
    for (const ReplicateValue& v : r.values) {
      out += std::to_string(r.index) + ',' + std::to_string(r.seed) + ',' +
             fmt_double(v.t) + ',' + v.kind + ',' + fmt_double(v.value) + '\n';
    }
  }
  return out;
}

void AggregateReport::write(const std::string& dir) const {
  const std::filesystem::path p = ensure_dir(dir);
  write_file(p / "replicates.csv", replicates_csv());
  write_file(p / "aggregate.json", aggregate_json);
  write_file(p / "conditions.json", conditions_json + "\n");
}

void simulate_to_dir(const ExperimentConfig& config, const std::string& dir,
                     std::size_t stride, unsigned threads) {
  config.validate();
  if (stride == 0) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  const std::filesystem::path p = ensure_dir(dir);
  const RunContext ctx(config);
  run_indexed<int>(config.replicates, threads, [&](std::size_t i) {
    const std::vector<SamplePath> paths = ctx.paths(replicate_seed(config.base_seed, i));
    std::string text = "t";
    for (std::size_t k = 0; k < ctx.dim; ++k) text += ",S" + std::to_string(k);
    text += '\n';
    const TimeGrid& grid = *ctx.grid;
    for (std::size_t g = 0; g < grid.size(); g += stride) {
      text += fmt_double(grid[g]);
      for (const SamplePath& sp : paths) text += ',' + fmt_double(sp.values[g]);
      text += '\n';
    }
    write_file(p / ("path_" + std::to_string(i) + ".csv"), text);
    return 0;
  });
}

void estimate_to_dir(const ExperimentConfig& config, const std::string& dir,
                     unsigned threads) {
  config.validate();
  const std::filesystem::path p = ensure_dir(dir);
  const RunContext ctx(config);
  const std::uint64_t hash = config_hash(config);
  const std::vector<double> times = with_horizon(config.eval_time_list(), config.horizon);
  run_indexed<int>(config.replicates, threads, [&](std::size_t i) {
    const std::vector<SamplePath> paths = ctx.paths(replicate_seed(config.base_seed, i));
    EstimateOut est = estimate(ctx, paths, times);
    est.series.config_hash = hash;
    write_file(p / ("series_" + std::to_string(i) + ".csv"), est.series.to_csv());
    return 0;
  });
  const Json meta = {{"config_hash", hex64(hash)},
                     {"estimator", estimator_name(config.resolved_estimator())},
                     {"family", to_json_value(config)["family"]},
                     {"model", to_json_value(config)["model"]}};
  write_file(p / "series_meta.json", meta.dump(2) + "\n");
}

std::string render_report(const std::string& aggregate_json) {
  Json j;
  try {
    j = Json::parse(aggregate_json);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed aggregate: ") + e.what());
  }
  std::vector<std::pair<std::string, std::string>> rows;
  const std::function<void(const Json&, const std::string&)> flatten =
      [&](const Json& node, const std::string& prefix) {
        if (node.is_object()) {
          for (const auto& [k, v] : node.items()) {
            flatten(v, prefix.empty() ? k : prefix + "." + k);
          }
        } else if (node.is_array()) {
          for (std::size_t i = 0; i < node.size(); ++i) {
            flatten(node[i], prefix + "[" + std::to_string(i) + "]");
          }
        } else {
          rows.emplace_back(prefix, node.is_string() ? node.get<std::string>() : node.dump());
        }
      };
  flatten(j, "");
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) {
    os << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << '\n';
  }
  return os.str();
}

}  // namespace asclt
