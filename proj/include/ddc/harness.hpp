#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ddc/datagen.hpp"
#include "ddc/metrics.hpp"
#include "ddc/solvers.hpp"
#include "ddc/sweep_config.hpp"
#include "ddc/theory.hpp"

namespace ddc {

struct TrialRecord {
  double kappa = 0.0;  // p / n
  int p = 0;
  int n = 0;
  int trial_index = 0;
  Loss loss = Loss::Square;
  bool ok = true;
  std::string failure;  // "rank_deficient" or "convergence" when !ok
  Regime regime = Regime::Underparametrized;
  double s = 0.0;
  double test_error = 0.0;
  double test_std_error = 0.0;
  double train_error = 0.0;
  double square_loss = 0.0;
  double norm = 0.0;
  // ||beta_hat - (mu/s) beta0||^2; NaN where no theory applies.
  double centering = 0.0;
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd beta0;
};

struct SweepRow {
  double kappa = 0.0;
  double s = 0.0;
  int p = 0;
  int n = 0;
  int trials = 0;  // trials that produced an estimate
  std::optional<double> emp_test_mean, emp_test_std, emp_train_mean, emp_sq_loss_mean, emp_norm_mean;
  std::optional<double> theory_risk, theory_mu, theory_alpha, theory_rho, theory_norm;
  std::string model, loss, rule;

  // Not serialized.
  std::optional<double> emp_centering_mean;
  int failed_trials = 0;
  bool valid = true;  // false when more than 10% of the trials failed
};

/// One configured sweep with its ground truth, fixed across all trials.
class Experiment {
 public:
  /// Validates the configuration (ConfigError) and builds eta0.
  explicit Experiment(SweepConfig cfg);

  const SweepConfig& config() const { return cfg_; }
  const GroundTruth& ground_truth() const { return gt_; }

  /// Samples the training set of cell (kappa, trial_index) and fits every
  /// loss of the configuration on it. Deterministic in its arguments.
  std::vector<TrialRecord> run_trial(double kappa, int trial_index) const;

  /// All grid points (duplicate p collapsed), rows ordered by kappa then loss.
  std::vector<SweepRow> run_sweep() const;

  /// Theory columns for a square-loss row at p; nullopt near kappa = 1.
  std::optional<TheoryPoint> theory_at(int p) const;

 private:
  TrialRecord fit_one(const TrainingSet& ts, Loss loss, double kappa, int trial_index,
                      const std::optional<TheoryPoint>& theory) const;

  SweepConfig cfg_;
  GroundTruth gt_;
};

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) { return Experiment(cfg).run_sweep(); }

/// Aggregates the records of one (kappa, loss) cell in trial order.
SweepRow aggregate(const std::vector<TrialRecord>& records, const SweepConfig& cfg,
                   const std::optional<TheoryPoint>& theory);

/// Theory-only rows (square loss) for the CLI `theory` command.
std::vector<SweepRow> theory_rows(const SweepConfig& cfg);

}  // namespace ddc
