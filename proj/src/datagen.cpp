#include "ddc/datagen.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ddc/errors.hpp"
#include "ddc/special.hpp"

namespace ddc {

namespace {

// kappa = j / n_ref can exceed zeta by rounding when d = zeta n_ref.
constexpr double kappa_slack = 1e-12;

void check_sampling_args(int n, int p, const GroundTruth& gt) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  if (p < 1 || p > gt.d) {
    throw DomainError("sample: need 1 <= p <= d, got p=" + std::to_string(p) +
                      " d=" + std::to_string(gt.d));
  }
}

}  // namespace

void DataModelSpec::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("model: r must be positive");
  if (kind == ModelKind::GaussianMixture && !(prior_plus > 0.0 && prior_plus < 1.0)) {
    throw DomainError("model: prior_plus must lie in (0, 1)");
  }
}

void FeatureRule::validate() const {
  if (kind == RuleKind::Linear && !(zeta > 0.0)) throw DomainError("rule: zeta must be positive");
  if (kind == RuleKind::Polynomial && !(gamma >= 1.0)) throw DomainError("rule: gamma must be >= 1");
}

double FeatureRule::max_kappa() const {
  return kind == RuleKind::Linear ? zeta : std::numeric_limits<double>::infinity();
}

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Logistic ? "logistic" : "gm";
}

std::string_view to_string(RuleKind kind) { return kind == RuleKind::Linear ? "linear" : "poly"; }

double signal_fraction(const FeatureRule& rule, double kappa) {
  rule.validate();
  if (!(kappa > 0.0)) throw DomainError("signal_strength: kappa must be positive");
  if (rule.kind == RuleKind::Linear) {
    if (kappa > rule.zeta * (1.0 + kappa_slack)) {
      throw DomainError("signal_strength: kappa=" + std::to_string(kappa) +
                        " beyond linear-rule domain (0, zeta=" + std::to_string(rule.zeta) + "]");
    }
    return std::min(1.0, kappa / rule.zeta);
  }
  // 1 - (1+kappa)^-gamma without cancellation for small kappa.
  return -std::expm1(-rule.gamma * std::log1p(kappa));
}

double signal_strength(const FeatureRule& rule, double kappa, double r) {
  if (!(r > 0.0)) throw DomainError("signal_strength: r must be positive");
  return r * std::sqrt(signal_fraction(rule, kappa));
}

double GroundTruth::prefix_norm_squared(int p) const {
  return eta0.head(p).squaredNorm();
}

GroundTruth build_ground_truth(int d, int n_ref, const FeatureRule& rule, double r) {
  if (d < 1 || n_ref < 1) throw DomainError("build_ground_truth: d and n_ref must be >= 1");
  if (!(r > 0.0)) throw DomainError("build_ground_truth: r must be positive");
  rule.validate();
  if (static_cast<double>(d) / n_ref > rule.max_kappa() * (1.0 + kappa_slack)) {
    throw DomainError("build_ground_truth: d/n_ref exceeds the rule's kappa domain");
  }

  GroundTruth gt;
  gt.d = d;
  gt.n_ref = n_ref;
  gt.r = r;
  gt.eta0.resize(d);
  const double r2 = r * r;
  double prev = 0.0;
  for (int j = 1; j <= d; ++j) {
    const double kappa = static_cast<double>(j) / n_ref;
    double increment;
    if (rule.kind == RuleKind::Polynomial) {
      // (1 + (j-1)/n)^-gamma - (1 + j/n)^-gamma, each term kept separate.
      const double before = std::pow(1.0 + static_cast<double>(j - 1) / n_ref, -rule.gamma);
      const double after = std::pow(1.0 + kappa, -rule.gamma);
      increment = r2 * (before - after);
    } else {
      const double cur = r2 * signal_fraction(rule, kappa);
      increment = cur - prev;
      prev = cur;
    }
    if (!(increment >= 0.0)) throw InternalError("build_ground_truth: s^2 not monotone");
    gt.eta0(j - 1) = std::sqrt(increment);
  }
  const double stored = gt.eta0.squaredNorm();
  gt.residual_variance = std::max(0.0, r2 - stored);
  if (gt.residual_variance <= 1e-12 * r2) gt.residual_variance = 0.0;
  return gt;
}

TrainingSet sample_logistic(int n, int p, const GroundTruth& gt, RandomStream& rng) {
  check_sampling_args(n, p, gt);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;

  TrainingSet ts;
  ts.model = {ModelKind::Logistic, gt.r, 0.5};
  ts.r = gt.r;
  ts.beta0 = gt.eta0.head(p);
  ts.s = ts.beta0.norm();
  const double hidden_sd = std::sqrt(std::max(0.0, gt.r * gt.r - ts.s * ts.s));

  ts.W.resize(n, p);
  ts.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) ts.W(i, j) = normal(rng);
    const double hidden = hidden_sd * normal(rng);
    const double arg = ts.W.row(i).dot(ts.beta0) + hidden;
    ts.y(i) = uniform(rng) < sigmoid(arg) ? 1.0 : -1.0;
  }
  return ts;
}

TrainingSet sample_gm(int n, int p, const GroundTruth& gt, double prior_plus, RandomStream& rng) {
  check_sampling_args(n, p, gt);
  // The degenerate endpoints are allowed here; DataModelSpec rejects them.
  if (!(prior_plus >= 0.0 && prior_plus <= 1.0)) {
    throw DomainError("sample_gm: prior_plus must lie in [0, 1]");
  }
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;

  TrainingSet ts;
  ts.model = {ModelKind::GaussianMixture, gt.r, prior_plus};
  ts.r = gt.r;
  ts.beta0 = gt.eta0.head(p);
  ts.s = ts.beta0.norm();

  ts.W.resize(n, p);
  ts.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double label = uniform(rng) < prior_plus ? 1.0 : -1.0;
    ts.y(i) = label;
    for (int j = 0; j < p; ++j) ts.W(i, j) = label * ts.beta0(j) + normal(rng);
  }
  return ts;
}

TrainingSet sample(const DataModelSpec& model, int n, int p, const GroundTruth& gt,
                   RandomStream& rng) {
  if (model.kind == ModelKind::Logistic) return sample_logistic(n, p, gt, rng);
  return sample_gm(n, p, gt, model.prior_plus, rng);
}

}  // namespace ddc
