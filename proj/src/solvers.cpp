#include "ddc/solvers.hpp"

#include <cmath>
#include <string>

#include "ddc/errors.hpp"
#include "ddc/special.hpp"
#include "min_norm_point.hpp"

namespace ddc {

namespace {

// Below this ratio sigma_min / sigma_max the SVD fallback gives up.
constexpr double svd_ratio_floor = 1e-10;
constexpr double separability_tol = 1e-8;

void check_labels(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  if (W.rows() != y.size() || W.rows() == 0 || W.cols() == 0) {
    throw std::invalid_argument("solver: W must be n x p with n = len(y) >= 1 and p >= 1");
  }
}

Eigen::MatrixXd gram_of_columns(const Eigen::MatrixXd& W) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(W.cols(), W.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd gram_of_rows(const Eigen::MatrixXd& W) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(W.rows(), W.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(W);
  return g.selfadjointView<Eigen::Lower>();
}

// Pseudoinverse solve through the thin SVD of W; W must have full rank
// min(n, p) at ratio svd_ratio_floor.
Eigen::VectorXd svd_solve(const Eigen::MatrixXd& W, const Eigen::VectorXd& y, const char* who) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double ratio = sv(sv.size() - 1) / sv(0);
  if (!(ratio >= svd_ratio_floor)) {
    throw RankDeficientError(std::string(who) + ": matrix is rank deficient", ratio * ratio);
  }
  return svd.solve(y);
}

Eigen::MatrixXd signed_rows(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  return y.asDiagonal() * W;
}

}  // namespace

std::string_view to_string(Loss loss) { return loss == Loss::Square ? "square" : "logistic"; }

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Underparametrized: return "underparametrized";
    case Regime::Overparametrized: return "overparametrized";
    case Regime::Separable: return "separable";
    case Regime::NonSeparable: return "nonseparable";
  }
  return "?";
}

Eigen::VectorXd solve_ls_under(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  check_labels(W, y);
  if (W.cols() > W.rows()) throw RankDeficientError("solve_ls_under: p > n, W^T W is singular", 0.0);
  const Eigen::MatrixXd gram = gram_of_columns(W);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success && llt.rcond() >= gram_rcond_floor) {
    return llt.solve(W.transpose() * y);
  }
  return svd_solve(W, y, "solve_ls_under");
}

Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  check_labels(W, y);
  if (W.rows() > W.cols()) throw RankDeficientError("solve_min_norm: n > p, W W^T is singular", 0.0);
  const Eigen::MatrixXd gram = gram_of_rows(W);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success && llt.rcond() >= gram_rcond_floor) {
    return W.transpose() * llt.solve(y);
  }
  return svd_solve(W, y, "solve_min_norm");
}

Estimate fit_square_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  check_labels(W, y);
  Estimate est;
  est.loss = Loss::Square;
  const auto n = W.rows();
  const auto p = W.cols();
  if (n > p) {
    est.beta_hat = solve_ls_under(W, y);
    est.regime = Regime::Underparametrized;
    est.diagnostics["normal_residual_inf"] =
        (W.transpose() * (y - W * est.beta_hat)).lpNorm<Eigen::Infinity>();
  } else {
    if (p > n) {
      est.beta_hat = solve_min_norm(W, y);
    } else {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(W);
      const double rc = lu.rcond();
      if (!(rc >= gram_rcond_floor)) throw RankDeficientError("fit_square_loss: n = p and W singular", rc);
      est.beta_hat = lu.solve(y);
    }
    est.regime = Regime::Overparametrized;
    est.diagnostics["interpolation_residual_inf"] = (y - W * est.beta_hat).lpNorm<Eigen::Infinity>();
  }
  return est;
}

Estimate fit_square_loss(const TrainingSet& ts) { return fit_square_loss(ts.W, ts.y); }

double gram_top_eigenvalue(const Eigen::MatrixXd& W, double scale) {
  const auto p = W.cols();
  Eigen::VectorXd v(p);
  for (Eigen::Index j = 0; j < p; ++j) v(j) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(j));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd u = W.transpose() * (W * v);
    const double next = v.dot(u);
    const double norm = u.norm();
    if (norm == 0.0) return 0.0;
    v = u / norm;
    if (std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return scale * lambda / static_cast<double>(W.rows());
}

Estimate gd_square(const Eigen::MatrixXd& W, const Eigen::VectorXd& y, double step, double tol,
                   long max_iter) {
  check_labels(W, y);
  if (!(step > 0.0) || !(tol > 0.0)) throw std::invalid_argument("gd_square: step and tol must be positive");
  const double n = static_cast<double>(W.rows());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(W.cols());
  Eigen::VectorXd grad = -(2.0 / n) * (W.transpose() * y);
  const double initial = grad.norm();
  double gnorm = initial;
  long it = 0;
  for (; it < max_iter && gnorm > tol; ++it) {
    beta -= step * grad;
    grad = -(2.0 / n) * (W.transpose() * (y - W * beta));
    gnorm = grad.norm();
    if (!std::isfinite(gnorm) || gnorm > 1e12 * std::max(1.0, initial)) {
      throw ConvergenceError("gd_square: iterates diverged (step too large)", gnorm, true);
    }
  }
  if (gnorm > tol) {
    throw ConvergenceError("gd_square: no convergence within max_iter", gnorm, false);
  }
  Estimate est;
  est.beta_hat = beta;
  est.loss = Loss::Square;
  est.regime = W.cols() > W.rows() ? Regime::Overparametrized : Regime::Underparametrized;
  est.diagnostics["iterations"] = static_cast<double>(it);
  est.diagnostics["gradient_norm"] = gnorm;
  return est;
}

Estimate gd_square(const TrainingSet& ts, double step, double tol, long max_iter) {
  return gd_square(ts.W, ts.y, step, tol, max_iter);
}

bool check_separable(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  check_labels(W, y);
  if (W.cols() >= W.rows()) {
    // Full row rank: the interpolator has every margin equal to 1.
    Eigen::LLT<Eigen::MatrixXd> llt(gram_of_rows(W));
    if (llt.info() == Eigen::Success && llt.rcond() >= gram_rcond_floor) return true;
  }
  const auto mnp = detail::min_norm_point(signed_rows(W, y));
  return mnp.x.squaredNorm() > separability_tol * separability_tol * mnp.scale_squared;
}

double max_margin_kkt_residual(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha) {
  const Eigen::MatrixXd Z = signed_rows(W, y);
  const Eigen::VectorXd margins = Z * beta;
  double res = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    res = std::max(res, 1.0 - margins(i));
    res = std::max(res, -alpha(i));
    res = std::max(res, std::abs(alpha(i)) * std::abs(margins(i) - 1.0));
  }
  const double stationarity = (beta - Z.transpose() * alpha).lpNorm<Eigen::Infinity>() /
                              std::max(1.0, beta.lpNorm<Eigen::Infinity>());
  return std::max(res, stationarity);
}

namespace {

MaxMarginSolution max_margin_from(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                                  const detail::MinNormPoint& mnp) {
  const double xx = mnp.x.squaredNorm();
  if (!(xx > separability_tol * separability_tol * mnp.scale_squared)) {
    throw PreconditionError("max_margin: data are not linearly separable");
  }
  MaxMarginSolution sol;
  sol.beta = mnp.x / xx;
  sol.alpha = mnp.weights / xx;
  // Rescale so the smallest margin is exactly feasible.
  const double smallest = (signed_rows(W, y) * sol.beta).minCoeff();
  if (smallest < 1.0 && smallest > 0.0) {
    sol.beta /= smallest;
    sol.alpha /= smallest;
  }
  sol.kkt_residual = max_margin_kkt_residual(W, y, sol.beta, sol.alpha);
  sol.iterations = mnp.major_iterations;
  return sol;
}

}  // namespace

MaxMarginSolution max_margin(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  check_labels(W, y);
  return max_margin_from(W, y, detail::min_norm_point(signed_rows(W, y)));
}

Eigen::VectorXd solve_max_margin(const Eigen::MatrixXd& W, const Eigen::VectorXd& y) {
  return max_margin(W, y).beta;
}

Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& beta) {
  const Eigen::VectorXd margins = y.cwiseProduct(W * beta);
  Eigen::VectorXd coef(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) coef(i) = -y(i) * sigmoid(-margins(i));
  return W.transpose() * coef / static_cast<double>(W.rows());
}

namespace {

double logistic_objective(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& beta) {
  const Eigen::VectorXd margins = y.cwiseProduct(W * beta);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) sum += logistic_loss(margins(i));
  return sum / static_cast<double>(W.rows());
}

// Damped Newton on the logistic loss; the caller has ruled out separability
// so a finite minimizer exists.
Estimate logistic_newton(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                         const LogisticOptions& opt) {
  const double n = static_cast<double>(W.rows());
  const auto p = W.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double f = logistic_objective(W, y, beta);
  Eigen::VectorXd grad = logistic_gradient(W, y, beta);
  const long budget = std::min<long>(opt.max_iter, 500);
  long it = 0;
  for (; it < budget && grad.norm() > opt.tol; ++it) {
    const Eigen::VectorXd margins = y.cwiseProduct(W * beta);
    Eigen::VectorXd curvature(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) curvature(i) = sigmoid_derivative(margins(i));
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p, p);
    const Eigen::MatrixXd scaled = curvature.cwiseSqrt().asDiagonal() * W;
    hess.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose(), 1.0 / n);
    Eigen::MatrixXd full = hess.selfadjointView<Eigen::Lower>();
    full.diagonal().array() += 1e-14 * std::max(1.0, full.diagonal().maxCoeff());
    Eigen::VectorXd direction = -full.ldlt().solve(grad);
    if (!direction.allFinite() || direction.dot(grad) >= 0.0) direction = -grad;

    double t = 1.0;
    const double slope = direction.dot(grad);
    Eigen::VectorXd trial = beta + direction;
    double ft = logistic_objective(W, y, trial);
    while (ft > f + 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      trial = beta + t * direction;
      ft = logistic_objective(W, y, trial);
    }
    if (!(ft <= f)) break;  // no descent left at working precision
    beta = trial;
    f = ft;
    grad = logistic_gradient(W, y, beta);
  }
  const double gnorm = grad.norm();
  if (!(gnorm <= opt.tol)) {
    throw ConvergenceError("fit_logistic_loss: Newton iterations did not converge", gnorm, false);
  }
  Estimate est;
  est.beta_hat = beta;
  est.loss = Loss::Logistic;
  est.regime = Regime::NonSeparable;
  est.diagnostics["iterations"] = static_cast<double>(it);
  est.diagnostics["gradient_norm"] = gnorm;
  est.diagnostics["empirical_loss"] = f;
  return est;
}

}  // namespace

Estimate fit_logistic_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                           const LogisticOptions& opt) {
  check_labels(W, y);
  const auto mnp = detail::min_norm_point(signed_rows(W, y));
  if (mnp.x.squaredNorm() > separability_tol * separability_tol * mnp.scale_squared) {
    const MaxMarginSolution sol = max_margin_from(W, y, mnp);
    Estimate est;
    const double norm = sol.beta.norm();
    est.beta_hat = sol.beta / norm;
    est.loss = Loss::Logistic;
    est.regime = Regime::Separable;
    est.diagnostics["margin"] = 1.0 / norm;
    est.diagnostics["kkt_residual"] = sol.kkt_residual;
    est.diagnostics["iterations"] = sol.iterations;
    return est;
  }
  return logistic_newton(W, y, opt);
}

Estimate fit_logistic_loss(const TrainingSet& ts, const LogisticOptions& opt) {
  return fit_logistic_loss(ts.W, ts.y, opt);
}

Estimate gd_logistic(const Eigen::MatrixXd& W, const Eigen::VectorXd& y, double tol, long max_iter,
                     double step) {
  check_labels(W, y);
  if (!(step > 0.0)) step = 1.0 / gram_top_eigenvalue(W, 0.25);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(W.cols());
  Eigen::VectorXd grad = logistic_gradient(W, y, beta);
  double gnorm = grad.norm();
  long it = 0;
  for (; it < max_iter && gnorm > tol; ++it) {
    beta -= step * grad;
    grad = logistic_gradient(W, y, beta);
    gnorm = grad.norm();
  }
  Estimate est;
  est.beta_hat = beta;
  est.loss = Loss::Logistic;
  est.regime = gnorm <= tol ? Regime::NonSeparable : Regime::Separable;
  est.diagnostics["iterations"] = static_cast<double>(it);
  est.diagnostics["gradient_norm"] = gnorm;
  est.diagnostics["step"] = step;
  return est;
}

}  // namespace ddc
