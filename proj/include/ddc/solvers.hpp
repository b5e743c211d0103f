#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <string_view>

#include "ddc/datagen.hpp"

namespace ddc {

enum class Loss { Square, Logistic };
enum class Regime { Underparametrized, Overparametrized, Separable, NonSeparable };

std::string_view to_string(Loss loss);
std::string_view to_string(Regime regime);

struct Estimate {
  Eigen::VectorXd beta_hat;
  Loss loss = Loss::Square;
  Regime regime = Regime::Underparametrized;
  std::map<std::string, double> diagnostics;
};

/// Below this reciprocal condition number the Cholesky factor of a Gram
/// matrix is not trusted and the solve falls back to an SVD of W.
inline constexpr double gram_rcond_floor = 1e-10;

/// (W^T W)^-1 W^T y. Throws RankDeficientError if W has dependent columns.
Eigen::VectorXd solve_ls_under(const Eigen::MatrixXd& W, const Eigen::VectorXd& y);

/// W^T (W W^T)^-1 y, the minimum-norm interpolator. Throws
/// RankDeficientError if W has dependent rows.
Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& W, const Eigen::VectorXd& y);

/// Limit of gradient descent on the square loss from beta = 0:
/// least squares for n > p, min-norm interpolation for p > n. For n = p
/// the square system is solved directly and tagged Overparametrized
/// (it interpolates).
Estimate fit_square_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& y);
Estimate fit_square_loss(const TrainingSet& ts);

/// Largest eigenvalue of (scale / n) W^T W by power iteration.
double gram_top_eigenvalue(const Eigen::MatrixXd& W, double scale);

/// Plain gradient descent on (1/n) sum (y_i - w_i^T beta)^2 from beta = 0.
/// Stops when ||grad||_2 <= tol; throws ConvergenceError after max_iter
/// iterations or as soon as the iterates blow up (step too large).
Estimate gd_square(const Eigen::MatrixXd& W, const Eigen::VectorXd& y, double step, double tol,
                   long max_iter);
Estimate gd_square(const TrainingSet& ts, double step, double tol, long max_iter);

/// True iff some beta has y_i w_i^T beta >= 1 for all i. Decided through the
/// minimum-norm point of conv{y_i w_i}: separable iff that point is nonzero
/// (Gordan), at relative tolerance 1e-8.
bool check_separable(const Eigen::MatrixXd& W, const Eigen::VectorXd& y);

struct MaxMarginSolution {
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;  // dual multipliers, beta = sum_i alpha_i y_i w_i
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// Hard-margin problem min ||beta|| s.t. y_i w_i^T beta >= 1, via the
/// minimum-norm point x of conv{y_i w_i}: beta = x / ||x||^2. Throws
/// PreconditionError on non-separable data.
MaxMarginSolution max_margin(const Eigen::MatrixXd& W, const Eigen::VectorXd& y);

/// max_margin(W, y).beta
Eigen::VectorXd solve_max_margin(const Eigen::MatrixXd& W, const Eigen::VectorXd& y);

/// Largest KKT violation of a primal/dual pair for the hard-margin problem:
/// primal infeasibility max(0, 1 - y_i w_i^T beta), dual infeasibility
/// max(0, -alpha_i), complementary slackness alpha_i |y_i w_i^T beta - 1|,
/// and stationarity ||beta - sum alpha_i y_i w_i||_inf / max(1, ||beta||_inf).
double max_margin_kkt_residual(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha);

struct LogisticOptions {
  double tol = 1e-8;
  long max_iter = 1'000'000;
};

/// Limit of gradient descent on the logistic loss: the max-margin solution
/// when the data are separable (the normalized GD iterates converge to its
/// direction), otherwise the finite minimizer of the empirical loss, found
/// by damped Newton iterations.
Estimate fit_logistic_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                           const LogisticOptions& opt = {});
Estimate fit_logistic_loss(const TrainingSet& ts, const LogisticOptions& opt = {});

/// Gradient of (1/n) sum log(1 + exp(-y_i w_i^T beta)).
Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& beta);

/// Plain gradient descent on the logistic loss from beta = 0 with step
/// 1/L, L = top eigenvalue of (1/4n) W^T W, unless `step` is positive.
/// Stops at ||grad|| <= tol; on separable data the loss has no minimizer
/// and the run ends at max_iter without throwing (regime Separable).
Estimate gd_logistic(const Eigen::MatrixXd& W, const Eigen::VectorXd& y, double tol, long max_iter,
                     double step = 0.0);

}  // namespace ddc
