#include "ddc/theory.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ddc/errors.hpp"
#include "ddc/special.hpp"

namespace ddc {

namespace {

void check_kappa(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("theory: kappa must be positive");
  if (std::abs(kappa - 1.0) < threshold_band) {
    throw NearSingularityError("theory: kappa=" + std::to_string(kappa) +
                               " is at the interpolation threshold; the limiting risk is 1/2");
  }
}

TheoryPoint finish(TheoryPoint tp, double alpha2) {
  if (!(alpha2 >= 0.0) || !std::isfinite(alpha2)) {
    throw InternalError("theory: alpha^2 = " + std::to_string(alpha2) + " is not a valid variance");
  }
  tp.alpha = std::sqrt(alpha2);
  tp.rho = tp.alpha / tp.mu;
  tp.norm_prediction = std::sqrt(tp.mu * tp.mu + alpha2);
  return tp;
}

}  // namespace

double nu(double r, const quad::Options& opt) {
  if (!(r >= 0.0)) throw DomainError("nu: r must be >= 0");
  if (r == 0.0) return 0.5;
  constexpr std::array<double, 1> kink{0.0};
  return 2.0 * quad::gaussian_expectation([r](double h) { return sigmoid_derivative(r * h); }, kink, opt);
}

TheoryPoint theory_gm(double kappa, double s) {
  check_kappa(kappa);
  if (!(s > 0.0)) throw DomainError("theory_gm: s must be positive");
  TheoryPoint tp;
  tp.kappa = kappa;
  tp.s = s;
  tp.model = ModelKind::GaussianMixture;
  const double s2 = s * s;
  double alpha2;
  if (kappa < 1.0) {
    tp.mu = s / (1.0 + s2);
    alpha2 = kappa / (1.0 - kappa) / (1.0 + s2);
  } else {
    tp.mu = s / (kappa + s2);
    alpha2 = (kappa * kappa + s2) / ((kappa - 1.0) * (kappa + s2) * (kappa + s2));
  }
  tp = finish(tp, alpha2);
  tp.risk = gaussian_q(s / std::sqrt(1.0 + tp.rho * tp.rho));
  return tp;
}

double logistic_label_probability(double g, double r, double s, const quad::Options& opt) {
  const double hidden = std::sqrt(std::max(0.0, r * r - s * s));
  if (hidden == 0.0) return sigmoid(s * g);
  // The sigmoid's transition sits at z = -s g / hidden.
  const std::array<double, 1> centre{-s * g / hidden};
  return quad::gaussian_expectation([a = s * g, hidden](double z) { return sigmoid(a + hidden * z); },
                                    centre, opt);
}

double risk_logistic(double rho, double r, double s, const quad::Options& opt) {
  if (!(s > 0.0 && s <= r * (1.0 + 1e-12))) throw DomainError("risk_logistic: need 0 < s <= r");
  if (!(rho >= 0.0)) throw DomainError("risk_logistic: rho must be >= 0");
  if (std::isinf(rho)) return 0.5;
  s = std::min(s, r);
  constexpr std::array<double, 1> kink{0.0};
  if (rho == 0.0) {
    return quad::gaussian_expectation(
        [&](double g) {
          const double plus = logistic_label_probability(g, r, s, opt);
          return g < 0.0 ? plus : 1.0 - plus;
        },
        kink, opt);
  }
  return quad::gaussian_expectation(
      [&](double g) {
        const double plus = logistic_label_probability(g, r, s, opt);
        return plus * gaussian_cdf(-g / rho) + (1.0 - plus) * gaussian_cdf(g / rho);
      },
      kink, opt);
}

TheoryPoint theory_logistic(double kappa, double r, double s, const quad::Options& opt) {
  check_kappa(kappa);
  if (!(r > 0.0)) throw DomainError("theory_logistic: r must be positive");
  if (!(s > 0.0 && s <= r * (1.0 + 1e-12))) throw DomainError("theory_logistic: need 0 < s <= r");
  TheoryPoint tp;
  tp.kappa = kappa;
  tp.r = r;
  tp.s = s;
  tp.model = ModelKind::Logistic;
  const double v = nu(r, opt);
  const double sv2 = s * s * v * v;
  double alpha2;
  if (kappa < 1.0) {
    tp.mu = s * v;
    alpha2 = (1.0 - sv2) * kappa / (1.0 - kappa);
  } else {
    tp.mu = s * v / kappa;
    alpha2 = (kappa * kappa + (1.0 - 2.0 * kappa) * sv2) / (kappa * kappa * (kappa - 1.0));
  }
  tp = finish(tp, alpha2);
  tp.risk = risk_logistic(tp.rho, r, s, opt);
  return tp;
}

TheoryPoint theory_point(ModelKind model, double kappa, double r, double s) {
  if (model == ModelKind::Logistic) return theory_logistic(kappa, r, s);
  TheoryPoint tp = theory_gm(kappa, s);
  tp.r = r;
  return tp;
}

}  // namespace ddc
