#pragma once

#include <Eigen/Dense>

#include "ddc/datagen.hpp"
#include "ddc/random.hpp"
#include "ddc/solvers.hpp"

namespace ddc {

enum class RiskMethod { ClosedForm, Quadrature, MonteCarlo };

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;
  RiskMethod method = RiskMethod::ClosedForm;
  // beta_hat = 0: every point is labelled +1, so the true error is
  // 1 - prior_plus; value is reported as 1/2 with this flag set.
  bool degenerate = false;
};

/// Labels predicted by sign(x), with sign(0) = +1.
inline double predict_label(double score) { return score >= 0.0 ? 1.0 : -1.0; }

/// Fraction of training points with sign(w_i^T beta_hat) != y_i.
double training_error(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& W,
                      const Eigen::VectorXd& y);
double training_error(const Estimate& est, const TrainingSet& ts);

/// (1/n) sum (y_i - w_i^T beta_hat)^2.
double empirical_square_loss(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& W,
                             const Eigen::VectorXd& y);

/// Exact test error under the GM model given the training set:
/// Q(beta0^T beta_hat / ||beta_hat||).
RiskEstimate test_error_gm_conditional(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0);

/// Exact test error under the logistic model given the training set, with
/// c = beta0^T beta_hat / (r ||beta_hat||):
///   E_U[ f(rU) Q(cU/sqrt(1-c^2)) + (1 - f(rU)) Q(-cU/sqrt(1-c^2)) ],  U ~ N(0,1).
/// Throws GeometryError if |c| exceeds 1 by more than 1e-9.
RiskEstimate test_error_logistic_conditional(const Eigen::VectorXd& beta_hat,
                                             const Eigen::VectorXd& beta0, double r, double s);

/// The same expectation parametrized directly by the correlation c in [-1, 1].
double logistic_conditional_risk(double correlation, double r);

/// Mismatch rate of sign(w^T beta_hat) on m fresh samples from `model`, with
/// binomial standard error sqrt(v (1 - v) / m).
RiskEstimate test_error_monte_carlo(const Eigen::VectorXd& beta_hat, const GroundTruth& gt,
                                    const DataModelSpec& model, long m, RandomStream& rng);

}  // namespace ddc
