// ddcurves: theory curves, single trials, full sweeps and SVG plots for
// square-loss (and logistic-loss) linear classifiers across model sizes.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include "ddc/csv.hpp"
#include "ddc/errors.hpp"
#include "ddc/harness.hpp"
#include "ddc/svg.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Flags {
  std::string model = "gm";
  std::string loss = "square";
  std::string rule = "linear";
  double r = 2.0;
  double zeta = 5.0;
  double gamma = 2.0;
  double prior_plus = 0.5;
  int n = 400;
  int trials = 100;
  int dim = 0;
  std::string kappa_grid = "0.25,0.5,0.75,0.9,1.1,1.25,2,3,5";
  std::uint64_t seed = 1;
  std::string test_eval = "conditional";
  std::string out;
  bool paper_scale = false;
  int threads = 1;
  // simulate
  double kappa = 2.0;
  int trial = 0;
  // plot
  std::string in;
  bool log_x = false;
  bool show_train = false;
  std::string title = "Test error vs overparametrization ratio";
};

ddc::SweepConfig build_config(const Flags& f, bool for_sweep) {
  ddc::SweepConfig cfg;
  cfg.model.kind = ddc::parse_model(f.model);
  cfg.model.r = f.r;
  cfg.model.prior_plus = f.prior_plus;
  cfg.rule.kind = ddc::parse_rule(f.rule);
  cfg.rule.zeta = f.zeta;
  cfg.rule.gamma = f.gamma;
  cfg.loss = ddc::parse_loss(f.loss);
  cfg.n = f.paper_scale ? 500 : f.n;
  cfg.trials = f.paper_scale ? 300 : f.trials;
  cfg.ambient_dim = f.dim;
  cfg.seed = f.seed;
  cfg.test_eval = ddc::parse_test_eval(f.test_eval);
  cfg.output_path = f.out;
  cfg.threads = f.threads;
  cfg.kappa_grid = ddc::parse_kappa_grid(f.kappa_grid);
  // A generated range may land on the threshold; an explicit list may not.
  if (for_sweep && cfg.loss != ddc::LossSelection::Logistic && f.kappa_grid.find(':') != std::string::npos) {
    cfg.kappa_grid = ddc::drop_threshold_band(cfg.kappa_grid);
  }
  return cfg;
}

void write_rows(const std::vector<ddc::SweepRow>& rows, const std::string& path) {
  if (path.empty() || path == "-") {
    ddc::write_csv(rows, std::cout);
  } else {
    ddc::write_csv(rows, path);
  }
}

nlohmann::json record_json(const ddc::TrialRecord& rec) {
  nlohmann::json j;
  j["kappa"] = rec.kappa;
  j["p"] = rec.p;
  j["n"] = rec.n;
  j["trial"] = rec.trial_index;
  j["loss"] = std::string(ddc::to_string(rec.loss));
  j["s"] = rec.s;
  j["ok"] = rec.ok;
  if (!rec.ok) {
    j["failure"] = rec.failure;
    return j;
  }
  j["regime"] = std::string(ddc::to_string(rec.regime));
  j["test_error"] = rec.test_error;
  j["test_std_error"] = rec.test_std_error;
  j["train_error"] = rec.train_error;
  j["square_loss"] = rec.square_loss;
  j["norm"] = rec.norm;
  j["centering"] = std::isnan(rec.centering) ? nlohmann::json() : nlohmann::json(rec.centering);
  return j;
}

int run_theory(const Flags& f) {
  ddc::SweepConfig cfg = build_config(f, false);
  cfg.model.validate();
  cfg.rule.validate();
  write_rows(ddc::theory_rows(cfg), f.out);
  return exit_ok;
}

int run_simulate(const Flags& f) {
  ddc::SweepConfig cfg = build_config(f, false);
  cfg.kappa_grid = {f.kappa};
  cfg.trials = std::max(cfg.trials, f.trial + 1);
  const ddc::Experiment exp(cfg);
  nlohmann::json out = nlohmann::json::array();
  bool failed = false;
  for (const auto& rec : exp.run_trial(f.kappa, f.trial)) {
    out.push_back(record_json(rec));
    failed = failed || !rec.ok;
  }
  std::cout << out.dump(2) << '\n';
  return failed ? exit_numerical : exit_ok;
}

int run_sweep_command(const Flags& f) {
  const ddc::SweepConfig cfg = build_config(f, true);
  const auto rows = ddc::run_sweep(cfg);
  write_rows(rows, f.out);
  int status = exit_ok;
  for (const auto& row : rows) {
    if (!row.valid) {
      std::cerr << "kappa=" << row.kappa << " (" << row.loss << "): " << row.failed_trials
                << " failed trials, marked invalid\n";
      status = exit_numerical;
    }
  }
  return status;
}

int run_plot(const Flags& f) {
  if (f.in.empty() || f.out.empty()) throw ddc::ConfigError("plot needs --in CSV and --out SVG");
  ddc::SvgOptions opt;
  opt.log_x = f.log_x;
  opt.show_train = f.show_train;
  opt.title = f.title;
  ddc::emit_svg(ddc::read_csv(f.in), f.out, opt);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-descent curves for binary linear classification"};
  app.set_config("--config", "", "Flat key=value file mirroring the flags; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--model", f.model, "logistic | gm")->capture_default_str();
  app.add_option("--loss", f.loss, "square | logistic | both")->capture_default_str();
  app.add_option("--rule", f.rule, "linear | poly")->capture_default_str();
  app.add_option("--r", f.r, "Total signal strength")->capture_default_str();
  app.add_option("--zeta", f.zeta, "d/n for the linear rule")->capture_default_str();
  app.add_option("--gamma", f.gamma, "Exponent of the polynomial rule")->capture_default_str();
  app.add_option("--prior-plus", f.prior_plus, "GM class probability of +1")->capture_default_str();
  app.add_option("--n", f.n, "Training-set size")->capture_default_str();
  app.add_option("--trials", f.trials, "Trials per kappa")->capture_default_str();
  app.add_option("--d", f.dim, "Ambient dimension for the polynomial rule (0: max kappa * n)");
  app.add_option("--kappa-grid", f.kappa_grid, "a:b:step or comma-separated list")->join(',')->capture_default_str();
  app.add_option("--seed", f.seed, "Master seed")->capture_default_str();
  app.add_option("--test-eval", f.test_eval, "conditional | mc:M")->capture_default_str();
  app.add_option("--out", f.out, "Output path (CSV for theory/sweep, SVG for plot; '-' = stdout)");
  app.add_flag("--paper-scale", f.paper_scale, "n = 500, trials = 300");
  app.add_option("--threads", f.threads, "Worker threads for sweeps")->capture_default_str();
  app.add_option("--kappa", f.kappa, "simulate: kappa of the trial")->capture_default_str();
  app.add_option("--trial", f.trial, "simulate: trial index")->capture_default_str();
  app.add_option("--in", f.in, "plot: input CSV");
  app.add_flag("--log-x", f.log_x, "plot: logarithmic kappa axis");
  app.add_flag("--show-train", f.show_train, "plot: add training-error markers");
  app.add_option("--title", f.title, "plot: chart title");

  auto* theory = app.add_subcommand("theory", "Asymptotic risk on a kappa grid -> CSV");
  auto* simulate = app.add_subcommand("simulate", "One trial at --kappa -> JSON record");
  auto* sweep = app.add_subcommand("sweep", "Full simulation protocol -> CSV");
  auto* plot = app.add_subcommand("plot", "CSV -> SVG chart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    if (theory->parsed()) return run_theory(f);
    if (simulate->parsed()) return run_simulate(f);
    if (sweep->parsed()) return run_sweep_command(f);
    if (plot->parsed()) return run_plot(f);
  } catch (const ddc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ddc::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ddc::RankDeficientError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const ddc::ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  }
  return exit_config;
}
