#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "ddc/random.hpp"

namespace ddc {

enum class ModelKind { Logistic, GaussianMixture };

struct DataModelSpec {
  ModelKind kind = ModelKind::GaussianMixture;
  double r = 1.0;           // total signal strength ||eta0||
  double prior_plus = 0.5;  // P(y = +1); GM only

  /// Throws DomainError if r <= 0 or prior_plus is outside (0, 1).
  void validate() const;
};

enum class RuleKind { Linear, Polynomial };

/// Signal-strength rule s(kappa): how much of ||eta0|| the first
/// p = kappa n coordinates carry.
struct FeatureRule {
  RuleKind kind = RuleKind::Linear;
  double zeta = 5.0;   // d/n, Linear only; domain kappa in (0, zeta]
  double gamma = 2.0;  // Polynomial only, >= 1

  static FeatureRule linear(double zeta) { return {RuleKind::Linear, zeta, 0.0}; }
  static FeatureRule polynomial(double gamma) { return {RuleKind::Polynomial, 0.0, gamma}; }

  void validate() const;
  /// Upper end of the kappa domain (infinity for Polynomial).
  double max_kappa() const;
};

std::string_view to_string(ModelKind kind);
std::string_view to_string(RuleKind kind);

/// s with s^2 = r^2 kappa/zeta (Linear) or r^2 (1 - (1+kappa)^-gamma) (Polynomial).
double signal_strength(const FeatureRule& rule, double kappa, double r);

/// s^2(kappa) / r^2, computed without the cancellation of 1 - s^2/r^2.
double signal_fraction(const FeatureRule& rule, double kappa);

struct GroundTruth {
  Eigen::VectorXd eta0;  // length d
  int d = 0;
  int n_ref = 0;  // coordinate j carries kappa = j / n_ref
  double r = 0.0;
  // r^2 - ||eta0||^2: signal the generative process carries beyond the d
  // stored coordinates (positive for the Polynomial rule).
  double residual_variance = 0.0;

  /// sum_{j<p} eta0(j)^2.
  double prefix_norm_squared(int p) const;
};

/// eta0(j) = sqrt(s^2(j/n_ref) - s^2((j-1)/n_ref)), j = 1..d.
GroundTruth build_ground_truth(int d, int n_ref, const FeatureRule& rule, double r);

struct TrainingSet {
  Eigen::MatrixXd W;      // n x p
  Eigen::VectorXd y;      // +-1
  Eigen::VectorXd beta0;  // first p coordinates of eta0
  DataModelSpec model;
  double s = 0.0;  // ||beta0||
  double r = 0.0;

  int n() const { return static_cast<int>(W.rows()); }
  int p() const { return static_cast<int>(W.cols()); }
};

/// Logistic model: x ~ N(0, I_d), y ~ Rad(f(x^T eta0)); the learner sees w = x(1:p).
///
/// Only the p observed coordinates are drawn explicitly. The unobserved
/// part of the sigmoid argument, z^T gamma0 plus the residual term, is a
/// single N(0, r^2 - s^2) draw per row, which has the same joint law
/// with (w, y).
TrainingSet sample_logistic(int n, int p, const GroundTruth& gt, RandomStream& rng);

/// GM model: y = +1 w.p. prior_plus, x ~ N(y eta0, I_d), w = x(1:p).
/// Unobserved coordinates do not influence (w, y) and are not drawn.
TrainingSet sample_gm(int n, int p, const GroundTruth& gt, double prior_plus, RandomStream& rng);

/// Dispatches on model.kind.
TrainingSet sample(const DataModelSpec& model, int n, int p, const GroundTruth& gt,
                   RandomStream& rng);

}  // namespace ddc
