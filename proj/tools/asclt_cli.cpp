// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "asclt/c_api.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCheckFailed = 2;

constexpr const char* kSchemaHelp = R"(Config schema (JSON, unknown keys rejected):
  model       {drift, gaussian_vol, jump_intensity,
               jump: {type: normal, mean, sd} | {type: uniform, lo, hi}
                   | {type: discrete, points: [..], probs: [..]}}
  family      {type: sqrt_scalar | power_diag | weighted_exp | weighted_exp_prefactor,
               dim, betas: [..], alpha}
  horizon, step, replicates, base_seed
  eval_times  {t0, ratio, count}          geometric evaluation times
  experiment  asclt | lfq_consistency | clt_lfq | lil | conditions
  estimator   auto | sigma_hat | sigma_tilde | matrix_lfq
  tolerances  {ks_max, ks_pass_fraction, mean_tol, var_rel_tol, lil_slack,
               lil_t_lo, lil_t_hi, lil_max_violation_fraction, lil_stride, subsample}
  output      default output directory
)";

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  unsigned threads = 1;
  bool quiet = false;
  bool check = false;
  std::size_t stride = 1;
  std::string input;
};

struct ConfigHandle {
  asclt_config* ptr = nullptr;
  ~ConfigHandle() { asclt_config_free(ptr); }
};

struct ReportHandle {
  asclt_report* ptr = nullptr;
  ~ReportHandle() { asclt_report_free(ptr); }
};

int fail(asclt_status status) {
  std::cerr << "error (" << asclt_status_name(status) << "): " << asclt_last_error() << '\n';
  return kExitInvalid;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  asclt_string_free(s);
  return out;
}

// Loads the config and applies --seed / --replicates.
asclt_status load(const Options& o, ConfigHandle& cfg) {
  asclt_status st = asclt_config_load(o.config.c_str(), &cfg.ptr);
  if (st != ASCLT_OK) return st;
  if (o.seed) {
    st = asclt_config_set_seed(cfg.ptr, *o.seed);
    if (st != ASCLT_OK) return st;
  }
  if (o.replicates) st = asclt_config_set_replicates(cfg.ptr, *o.replicates);
  return st;
}

std::string out_dir(const Options& o, const ConfigHandle& cfg) {
  if (!o.out.empty()) return o.out;
  const std::string from_config = asclt_config_output(cfg.ptr);
  return from_config.empty() ? "." : from_config;
}

int run_experiment(const Options& o, const char* kind) {
  ConfigHandle cfg;
  asclt_status st = load(o, cfg);
  if (st == ASCLT_OK) st = asclt_config_set_experiment(cfg.ptr, kind);
  if (st != ASCLT_OK) return fail(st);
  ReportHandle rep;
  st = asclt_run(cfg.ptr, o.threads, &rep.ptr);
  if (st != ASCLT_OK) return fail(st);
  const std::string dir = out_dir(o, cfg);
  st = asclt_report_write(rep.ptr, dir.c_str());
  if (st != ASCLT_OK) return fail(st);
  if (!o.quiet) {
    char* agg = nullptr;
    if (asclt_report_aggregate_json(rep.ptr, &agg) == ASCLT_OK) {
      char* table = nullptr;
      if (asclt_render_report(agg, &table) == ASCLT_OK) std::cout << take(table);
    }
    asclt_string_free(agg);
    std::cout << "outputs written to " << dir << '\n';
  }
  const bool failed = asclt_report_gated(rep.ptr) && !asclt_report_passed(rep.ptr);
  return o.check && failed ? kExitCheckFailed : kExitOk;
}

int check_family(const Options& o) {
  ConfigHandle cfg;
  asclt_status st = load(o, cfg);
  if (st == ASCLT_OK) st = asclt_config_set_experiment(cfg.ptr, "conditions");
  if (st != ASCLT_OK) return fail(st);
  ReportHandle rep;
  st = asclt_run(cfg.ptr, 1, &rep.ptr);
  const std::string dir = out_dir(o, cfg);
  if (st == ASCLT_OK) st = asclt_report_write(rep.ptr, dir.c_str());
  if (st != ASCLT_OK) return fail(st);
  if (!o.quiet) {
    char* json = nullptr;
    if (asclt_report_conditions_json(rep.ptr, &json) == ASCLT_OK) {
      std::cout << take(json) << '\n';
    }
    std::cout << "written to " << dir << "/conditions.json\n";
  }
  return o.check && !asclt_report_passed(rep.ptr) ? kExitCheckFailed : kExitOk;
}

int simulate(const Options& o) {
  ConfigHandle cfg;
  asclt_status st = load(o, cfg);
  if (st != ASCLT_OK) return fail(st);
  const std::string dir = out_dir(o, cfg);
  st = asclt_simulate(cfg.ptr, dir.c_str(), o.stride, o.threads);
  if (st != ASCLT_OK) return fail(st);
  if (!o.quiet) std::cout << "paths written to " << dir << '\n';
  return kExitOk;
}

int estimate(const Options& o) {
  ConfigHandle cfg;
  asclt_status st = load(o, cfg);
  if (st != ASCLT_OK) return fail(st);
  const std::string dir = out_dir(o, cfg);
  st = asclt_estimate(cfg.ptr, dir.c_str(), o.threads);
  if (st != ASCLT_OK) return fail(st);
  if (!o.quiet) std::cout << "series written to " << dir << '\n';
  return kExitOk;
}

int report(const Options& o) {
  const std::string path =
      !o.input.empty() ? o.input : (o.out.empty() ? "." : o.out) + "/aggregate.json";
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    std::cerr << "error: cannot read " << path << '\n';
    return kExitInvalid;
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  char* table = nullptr;
  const asclt_status st = asclt_render_report(ss.str().c_str(), &table);
  if (st != ASCLT_OK) return fail(st);
  std::cout << take(table);
  return kExitOk;
}

void add_common(CLI::App* sub, Options& o, bool needs_config) {
  auto* c = sub->add_option("--config", o.config, "Experiment config (JSON)");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--seed", o.seed, "Override base_seed");
  sub->add_option("--replicates", o.replicates, "Override replicate count");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  sub->add_flag("--quiet", o.quiet, "Suppress the summary table");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for almost-sure limit theorems of Levy martingales"};
  app.footer(kSchemaHelp);
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Dump simulated paths as CSV");
  add_common(sim, o, true);
  sim->add_option("--stride", o.stride, "Write every n-th grid point")->check(CLI::PositiveNumber);

  auto* fam = app.add_subcommand("check-family", "Check the normalization family conditions");
  add_common(fam, o, true);
  fam->add_flag("--check", o.check, "Exit 2 when a condition fails");

  auto* est = app.add_subcommand("estimate", "Write estimator series per replicate");
  add_common(est, o, true);

  struct Exp {
    const char* name;
    const char* kind;
    const char* help;
  };
  const Exp exps[] = {{"asclt", "asclt", "Weighted empirical measure vs the Gaussian limit"},
                      {"clt", "clt_lfq", "CLT of the quadratic estimator"},
                      {"lil", "lil", "Iterated-logarithm ratio sup"},
                      {"lfq", "lfq_consistency", "Consistency of the quadratic estimator"}};
  std::vector<std::pair<CLI::App*, const char*>> exp_cmds;
  for (const Exp& e : exps) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, o, true);
    sub->add_flag("--check", o.check, "Exit 2 when the acceptance check fails");
    exp_cmds.emplace_back(sub, e.kind);
  }

  auto* rep = app.add_subcommand("report", "Render aggregate.json as a text table");
  rep->add_option("--in", o.input, "aggregate.json path");
  rep->add_option("--out", o.out, "Directory holding aggregate.json");

  if (argc < 2) {
    std::cout << app.help();
    return kExitInvalid;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << kSchemaHelp;
    return kExitInvalid;
  }

  if (*sim) return simulate(o);
  if (*fam) return check_family(o);
  if (*est) return estimate(o);
  if (*rep) return report(o);
  for (const auto& [sub, kind] : exp_cmds) {
    if (*sub) return run_experiment(o, kind);
  }
  std::cout << app.help();
  return kExitInvalid;
}
