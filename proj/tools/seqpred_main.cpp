// Experiment runner: parses a config, dispatches to the exact evaluator,
// the bound checker, the game layer, the proof-inequality grid or the
// Monte Carlo estimator, and emits CSV plus a run manifest.
//
// Exit codes: 0 success, 1 theorem/invariant violation (the violating
// quantity is named on stderr), 2 configuration error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "seqpred/seqpred.hpp"

namespace {

using nlohmann::json;
using namespace seqpred;

constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

struct GlobalOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;  // 0 = auto; never changes results
  int exact_cap = kDefaultExactCap;
};

void write_manifest(const GlobalOptions& opts, const ExperimentConfig& cfg, const std::string& subcommand,
                    std::uint64_t effective_seed) {
  json m;
  m["tool"] = "seqpred";
  m["version"] = std::string(kVersion);
  m["subcommand"] = subcommand;
  m["config_path"] = opts.config_path;
  m["config_digest"] = "fnv1a64:" + fnv1a64_hex(cfg.raw_text);
  // Verbatim config text; exact-fraction values survive here even though
  // computation uses their nearest doubles.
  m["config_text"] = cfg.raw_text;
  m["seed"] = effective_seed;
  m["threads"] = opts.threads;
  m["exact_cap"] = opts.exact_cap;
  m["out"] = opts.out_path;

  std::ofstream out(opts.out_path + ".manifest.json", std::ios::binary);
  if (!out) throw Error("cannot open manifest file: " + opts.out_path + ".manifest.json");
  out << m.dump(2) << '\n';
}

int violation(const std::string& env_id, int n, const std::string& what) {
  std::cerr << "violation: env=" << env_id << " n=" << n << " " << what << "\n";
  return kExitViolation;
}

int run_eval(const GlobalOptions& opts, const ExperimentConfig& cfg) {
  const ModelClass mc = cfg.build_model_class();
  cfg.resolve_mu_index(mc);
  const Measure mu = cfg.build_mu();
  const LossSpec loss = cfg.build_loss();
  const int n = cfg.horizons.back();

  const EvalReport report = evaluate_environment(mu, mc, loss, n, opts.exact_cap);

  CsvWriter csv(opts.out_path);
  csv.row("t", "L_xi_cum", "L_mu_cum", "h_t", "H_cum", "S_cum");
  for (int t = 1; t <= n; ++t) {
    const std::size_t i = static_cast<std::size_t>(t) - 1;
    csv.row(t, report.loss_xi_cum[i], report.loss_mu_cum[i], report.h_step[i], report.entropy_cum[i],
            report.conv_cum[i]);
  }
  csv.flush();

  if (const auto bad = check_eval_invariants(report)) {
    return violation(cfg.env_id, n, *bad);
  }
  return 0;
}

int run_bounds(const GlobalOptions& opts, const ExperimentConfig& cfg) {
  const ModelClass mc = cfg.build_model_class();
  cfg.resolve_mu_index(mc);
  const Measure mu = cfg.build_mu();
  const LossSpec loss = cfg.build_loss();

  CsvWriter csv(opts.out_path);
  csv.row("env_id", "n", "L_xi", "L_mu", "H_n", "unit_bound", "general_bound", "slack_unit",
          "slack_general", "pass");

  std::optional<int> first_bad;
  std::string bad_what;
  for (int n : cfg.horizons) {
    const BoundCheck bc = check_bounds(mu, mc, loss, n, opts.exact_cap);
    csv.row(cfg.env_id, n, bc.loss_xi, bc.loss_mu, bc.entropy, bc.unit.bound, bc.general.bound,
            bc.unit.slack, bc.general.slack, bc.pass());
    if (!bc.pass() && !first_bad) {
      first_bad = n;
      bad_what = !bc.diff_nonneg       ? "informed-optimality (L_xi >= L_mu) violated"
                 : !bc.unit.pass       ? "unit loss bound slack negative"
                                       : "general loss bound slack negative";
    }
  }
  csv.flush();

  if (first_bad) return violation(cfg.env_id, *first_bad, bad_what);
  return 0;
}

int run_game(const GlobalOptions& opts, const ExperimentConfig& cfg) {
  cfg.resolve_mu_index(cfg.build_model_class());

  CsvWriter csv(opts.out_path);
  csv.row("n", "P_xi", "P_mu", "pbar_xi", "pbar_mu", "H_n", "eq12_bound", "eq13_threshold",
          "thm_ii_threshold", "in_winning_zone");

  std::optional<int> first_bad;
  std::string bad_what;
  for (int n : cfg.horizons) {
    const GameSpec spec = cfg.build_game(n);
    const GameReport r = run_game(spec, opts.exact_cap);
    csv.row(r.n, r.profit_xi, r.profit_mu, r.pbar_xi, r.pbar_mu, r.entropy, r.bound,
            r.winning_threshold, r.time_to_win, r.in_winning_zone);
    if (!first_bad) {
      if (!r.bound_holds) {
        first_bad = n;
        bad_what = "profit lower bound violated (P_xi < bound)";
      } else if (r.past_time_to_win && r.pbar_mu > 0.0 && !(r.pbar_xi > 0.0)) {
        first_bad = n;
        bad_what = "past the time-to-win threshold but universal average profit is not positive";
      }
    }
  }
  csv.flush();

  if (first_bad) return violation(cfg.env_id, *first_bad, bad_what);
  return 0;
}

int run_verify_ineq(const GlobalOptions& opts, const ExperimentConfig& cfg) {
  const InequalityGridResult result = verify_proof_inequalities(cfg.grid);

  CsvWriter csv(opts.out_path);
  csv.row("A", "B", "min_low_branch", "min_high_branch", "pass");
  for (const auto& row : result.rows) {
    const bool ok = row.min_low >= -cfg.grid.tolerance && row.min_high >= -cfg.grid.tolerance;
    csv.row(row.a, row.b, row.min_low, row.min_high, ok);
  }
  csv.flush();

  if (!result.pass(cfg.grid.tolerance)) {
    return violation(cfg.env_id, cfg.grid.resolution, "proof inequality grid minimum below -tolerance");
  }
  return 0;
}

int run_mc(const GlobalOptions& opts, const ExperimentConfig& cfg, std::uint64_t seed) {
  const ModelClass mc = cfg.build_model_class();
  const Measure mu = cfg.build_mu();
  const LossSpec loss = cfg.build_loss();
  const int n = cfg.horizons.back();

  CsvWriter csv(opts.out_path);
  csv.row("scheme", "n", "samples", "seed", "estimate", "stderr");
  const McResult xi = mc_expected_loss(mu, Predictor::mixture(mc, loss), n, cfg.samples, seed, opts.threads);
  csv.row("xi", n, xi.samples, seed, xi.estimate, xi.std_error);
  const McResult inf = mc_expected_loss(mu, Predictor::informed(mu, loss), n, cfg.samples, seed, opts.threads);
  csv.row("mu", n, inf.samples, seed, inf.estimate, inf.std_error);
  csv.flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian mixture sequence prediction: exact evaluation, loss/profit bounds, "
               "and proof-inequality verification"};
  app.require_subcommand(1);

  GlobalOptions opts;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  app.add_option("--config", opts.config_path, "experiment config file")->required();
  app.add_option("--out", opts.out_path, "output CSV path")->required();
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed_flag = s; seed_given = true; },
         "override the config's random seed");
  app.add_option("--threads", opts.threads, "worker threads for Monte Carlo (0 = auto); never changes results");
  app.add_option("--exact-cap", opts.exact_cap, "maximum horizon for exact enumeration");

  auto* cmd_eval = app.add_subcommand("eval", "exact losses, entropy and convergence sums per step");
  auto* cmd_bounds = app.add_subcommand("bounds", "loss-bound report with slacks");
  auto* cmd_game = app.add_subcommand("game", "profit report with winning-zone thresholds");
  auto* cmd_ineq = app.add_subcommand("verify-ineq", "grid-verify the proof inequalities");
  auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo loss estimate");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = load_experiment_config(opts.config_path);
    if (seed_given) opts.seed = seed_flag;
    const std::uint64_t effective_seed = opts.seed.value_or(cfg.seed);

    int rc = 0;
    std::string subcommand;
    if (cmd_eval->parsed()) {
      subcommand = "eval";
      rc = run_eval(opts, cfg);
    } else if (cmd_bounds->parsed()) {
      subcommand = "bounds";
      rc = run_bounds(opts, cfg);
    } else if (cmd_game->parsed()) {
      subcommand = "game";
      rc = run_game(opts, cfg);
    } else if (cmd_ineq->parsed()) {
      subcommand = "verify-ineq";
      rc = run_verify_ineq(opts, cfg);
    } else if (cmd_mc->parsed()) {
      subcommand = "mc";
      rc = run_mc(opts, cfg, effective_seed);
    }

    write_manifest(opts, cfg, subcommand, effective_seed);
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HorizonTooLarge& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ModelNotInClass& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
