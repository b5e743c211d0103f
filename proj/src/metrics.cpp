#include "ddc/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ddc/errors.hpp"
#include "ddc/quadrature.hpp"
#include "ddc/special.hpp"

namespace ddc {

namespace {

constexpr double geometry_tol = 1e-9;

}  // namespace

double training_error(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& W,
                      const Eigen::VectorXd& y) {
  const Eigen::VectorXd scores = W * beta_hat;
  long wrong = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (predict_label(scores(i)) != y(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

double training_error(const Estimate& est, const TrainingSet& ts) {
  return training_error(est.beta_hat, ts.W, ts.y);
}

double empirical_square_loss(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& W,
                             const Eigen::VectorXd& y) {
  return (y - W * beta_hat).squaredNorm() / static_cast<double>(y.size());
}

RiskEstimate test_error_gm_conditional(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0) {
  if (beta_hat.size() != beta0.size()) throw std::invalid_argument("test_error_gm_conditional: size mismatch");
  const double norm = beta_hat.norm();
  if (norm == 0.0) return {0.5, 0.0, RiskMethod::ClosedForm, true};
  return {gaussian_q(beta0.dot(beta_hat) / norm), 0.0, RiskMethod::ClosedForm, false};
}

double logistic_conditional_risk(double c, double r) {
  constexpr std::array<double, 1> kink{0.0};
  if (c >= 1.0 || c <= -1.0) {
    const double sign = c > 0.0 ? 1.0 : -1.0;
    // sign(w^T beta_hat) = sign(c U): the error is the label disagreeing with it.
    return quad::gaussian_expectation(
        [r, sign](double u) {
          const double f = sigmoid(r * u);
          return sign * u < 0.0 ? f : 1.0 - f;
        },
        kink);
  }
  const double k = c / std::sqrt(1.0 - c * c);
  return quad::gaussian_expectation(
      [r, k](double u) {
        const double f = sigmoid(r * u);
        return f * gaussian_q(k * u) + (1.0 - f) * gaussian_q(-k * u);
      },
      kink);
}

RiskEstimate test_error_logistic_conditional(const Eigen::VectorXd& beta_hat,
                                             const Eigen::VectorXd& beta0, double r, double s) {
  if (beta_hat.size() != beta0.size()) {
    throw std::invalid_argument("test_error_logistic_conditional: size mismatch");
  }
  if (!(s > 0.0 && s <= r * (1.0 + 1e-12))) {
    throw DomainError("test_error_logistic_conditional: need 0 < s <= r");
  }
  const double norm = beta_hat.norm();
  if (norm == 0.0) return {0.5, 0.0, RiskMethod::Quadrature, true};
  double c = beta0.dot(beta_hat) / (r * norm);
  if (std::abs(c) > 1.0 + geometry_tol) {
    throw GeometryError("test_error_logistic_conditional: |beta0^T beta_hat| > r ||beta_hat||");
  }
  c = std::clamp(c, -1.0, 1.0);
  return {logistic_conditional_risk(c, r), 0.0, RiskMethod::Quadrature, false};
}

RiskEstimate test_error_monte_carlo(const Eigen::VectorXd& beta_hat, const GroundTruth& gt,
                                    const DataModelSpec& model, long m, RandomStream& rng) {
  if (m < 1) throw std::invalid_argument("test_error_monte_carlo: m must be >= 1");
  const auto p = beta_hat.size();
  if (p < 1 || p > gt.d) throw DomainError("test_error_monte_carlo: need 1 <= p <= d");
  const Eigen::VectorXd beta0 = gt.eta0.head(p);

  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const double s2 = beta0.squaredNorm();
  const double hidden_sd = std::sqrt(std::max(0.0, gt.r * gt.r - s2));
  Eigen::VectorXd w(p);
  long wrong = 0;
  for (long k = 0; k < m; ++k) {
    double label;
    if (model.kind == ModelKind::Logistic) {
      for (Eigen::Index j = 0; j < p; ++j) w(j) = normal(rng);
      const double arg = w.dot(beta0) + hidden_sd * normal(rng);
      label = uniform(rng) < sigmoid(arg) ? 1.0 : -1.0;
    } else {
      label = uniform(rng) < model.prior_plus ? 1.0 : -1.0;
      for (Eigen::Index j = 0; j < p; ++j) w(j) = label * beta0(j) + normal(rng);
    }
    if (predict_label(w.dot(beta_hat)) != label) ++wrong;
  }
  const double v = static_cast<double>(wrong) / static_cast<double>(m);
  return {v, std::sqrt(v * (1.0 - v) / static_cast<double>(m)), RiskMethod::MonteCarlo,
          beta_hat.norm() == 0.0};
}

}  // namespace ddc
