#include "ddc/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "ddc/errors.hpp"
#include "ddc/random.hpp"

namespace ddc {

namespace {

constexpr double max_failed_fraction = 0.10;

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void fill_theory(SweepRow& row, const std::optional<TheoryPoint>& theory) {
  if (!theory) return;
  row.theory_risk = theory->risk;
  row.theory_mu = theory->mu;
  row.theory_alpha = theory->alpha;
  row.theory_rho = theory->rho;
  row.theory_norm = theory->norm_prediction;
}

// Runs body(i) for i in [0, count) on `threads` workers. Each index is
// written by exactly one worker, so results need no further ordering.
template <class Body>
void parallel_for(std::size_t count, int threads, Body body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Experiment::Experiment(SweepConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  gt_ = build_ground_truth(cfg_.ambient_dimension(), cfg_.n, cfg_.rule, cfg_.model.r);
}

std::optional<TheoryPoint> Experiment::theory_at(int p) const {
  const double kappa = static_cast<double>(p) / cfg_.n;
  if (std::abs(kappa - 1.0) < threshold_band) return std::nullopt;
  const double s = std::sqrt(gt_.prefix_norm_squared(p));
  return theory_point(cfg_.model.kind, kappa, gt_.r, s);
}

TrialRecord Experiment::fit_one(const TrainingSet& ts, Loss loss, double kappa, int trial_index,
                                const std::optional<TheoryPoint>& theory) const {
  TrialRecord rec;
  rec.kappa = kappa;
  rec.p = ts.p();
  rec.n = ts.n();
  rec.trial_index = trial_index;
  rec.loss = loss;
  rec.s = ts.s;
  rec.beta0 = ts.beta0;

  Estimate est;
  try {
    est = loss == Loss::Square ? fit_square_loss(ts) : fit_logistic_loss(ts);
  } catch (const RankDeficientError&) {
    rec.ok = false;
    rec.failure = "rank_deficient";
    return rec;
  } catch (const ConvergenceError&) {
    rec.ok = false;
    rec.failure = "convergence";
    return rec;
  }
  rec.regime = est.regime;
  rec.beta_hat = est.beta_hat;

  RiskEstimate risk;
  if (cfg_.test_eval.kind == TestEval::Kind::MonteCarlo) {
    RandomStream test_rng = derive_stream(cfg_.seed, kappa, static_cast<std::uint64_t>(trial_index),
                                          StreamPurpose::TestSample);
    risk = test_error_monte_carlo(est.beta_hat, gt_, cfg_.model, cfg_.test_eval.samples, test_rng);
  } else if (cfg_.model.kind == ModelKind::GaussianMixture) {
    risk = test_error_gm_conditional(est.beta_hat, ts.beta0);
  } else {
    risk = test_error_logistic_conditional(est.beta_hat, ts.beta0, ts.r, ts.s);
  }
  rec.test_error = risk.value;
  rec.test_std_error = risk.std_error;
  rec.train_error = training_error(est, ts);
  rec.square_loss = empirical_square_loss(est.beta_hat, ts.W, ts.y);
  rec.norm = est.beta_hat.norm();
  rec.centering = std::numeric_limits<double>::quiet_NaN();
  if (loss == Loss::Square && theory) {
    rec.centering = (est.beta_hat - (theory->mu / ts.s) * ts.beta0).squaredNorm();
  }
  return rec;
}

std::vector<TrialRecord> Experiment::run_trial(double kappa, int trial_index) const {
  const int p = model_size(kappa, cfg_.n);
  const double kappa_eff = static_cast<double>(p) / cfg_.n;
  RandomStream rng = derive_stream(cfg_.seed, kappa_eff, static_cast<std::uint64_t>(trial_index));
  const TrainingSet ts = sample(cfg_.model, cfg_.n, p, gt_, rng);
  const auto losses = cfg_.losses();
  std::optional<TheoryPoint> theory;
  if (cfg_.loss != LossSelection::Logistic) theory = theory_at(p);
  std::vector<TrialRecord> out;
  for (Loss loss : losses) out.push_back(fit_one(ts, loss, kappa_eff, trial_index, theory));
  return out;
}

SweepRow aggregate(const std::vector<TrialRecord>& records, const SweepConfig& cfg,
                   const std::optional<TheoryPoint>& theory) {
  SweepRow row;
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  const TrialRecord& first = records.front();
  row.kappa = first.kappa;
  row.s = first.s;
  row.p = first.p;
  row.n = first.n;
  row.model = std::string(to_string(cfg.model.kind));
  row.loss = std::string(to_string(first.loss));
  row.rule = std::string(to_string(cfg.rule.kind));

  std::vector<double> test, train, sq, norm, centering;
  for (const auto& r : records) {
    if (!r.ok) {
      ++row.failed_trials;
      continue;
    }
    test.push_back(r.test_error);
    train.push_back(r.train_error);
    sq.push_back(r.square_loss);
    norm.push_back(r.norm);
    if (!std::isnan(r.centering)) centering.push_back(r.centering);
  }
  row.trials = static_cast<int>(test.size());
  row.valid = row.failed_trials <= max_failed_fraction * static_cast<double>(records.size());
  if (row.valid && !test.empty()) {
    row.emp_test_mean = mean_of(test);
    row.emp_test_std = sample_std(test);
    row.emp_train_mean = mean_of(train);
    row.emp_sq_loss_mean = mean_of(sq);
    row.emp_norm_mean = mean_of(norm);
    if (!centering.empty()) row.emp_centering_mean = mean_of(centering);
  }
  if (first.loss == Loss::Square) fill_theory(row, theory);
  return row;
}

std::vector<SweepRow> Experiment::run_sweep() const {
  std::vector<double> kappas;
  int last_p = -1;
  for (double k : cfg_.kappa_grid) {
    const int p = model_size(k, cfg_.n);
    if (p == last_p) continue;
    kappas.push_back(k);
    last_p = p;
  }

  const auto losses = cfg_.losses();
  const std::size_t trials = static_cast<std::size_t>(cfg_.trials);
  std::vector<std::vector<TrialRecord>> cells(kappas.size() * trials);
  parallel_for(cells.size(), cfg_.threads, [&](std::size_t i) {
    auto recs = run_trial(kappas[i / trials], static_cast<int>(i % trials));
    for (auto& r : recs) {
      r.beta_hat.resize(0);
      r.beta0.resize(0);
    }
    cells[i] = std::move(recs);
  });

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    const int p = model_size(kappas[k], cfg_.n);
    std::optional<TheoryPoint> theory;
    if (cfg_.loss != LossSelection::Logistic) theory = theory_at(p);
    for (std::size_t l = 0; l < losses.size(); ++l) {
      std::vector<TrialRecord> recs;
      recs.reserve(trials);
      for (std::size_t t = 0; t < trials; ++t) recs.push_back(cells[k * trials + t][l]);
      SweepRow row = aggregate(recs, cfg_, theory);
      row.s = std::sqrt(gt_.prefix_norm_squared(p));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> theory_rows(const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  for (double k : cfg.kappa_grid) {
    SweepRow row;
    row.kappa = k;
    row.n = cfg.n;
    row.p = model_size(k, cfg.n);
    row.s = signal_strength(cfg.rule, k, cfg.model.r);
    row.model = std::string(to_string(cfg.model.kind));
    row.loss = std::string(to_string(Loss::Square));
    row.rule = std::string(to_string(cfg.rule.kind));
    if (std::abs(k - 1.0) >= threshold_band) {
      fill_theory(row, theory_point(cfg.model.kind, k, cfg.model.r, row.s));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ddc
