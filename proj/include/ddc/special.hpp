#pragma once

#include <cmath>
#include <numbers>

namespace ddc {

/// Gaussian upper tail, Q(t) = P(N(0,1) > t).
inline double gaussian_q(double t) {
  return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

/// Standard normal CDF.
inline double gaussian_cdf(double t) {
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

inline double gaussian_pdf(double t) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343819;
  return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

/// f(t) = 1 / (1 + exp(-t)), evaluated without overflow for either sign.
inline double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// f'(t) = exp(-t) / (1 + exp(-t))^2 = f(t) f(-t).
inline double sigmoid_derivative(double t) {
  const double e = std::exp(-std::abs(t));
  const double d = 1.0 + e;
  return e / (d * d);
}

/// log(1 + exp(-t)), the logistic loss at margin t.
inline double logistic_loss(double t) {
  if (t > 0.0) {
    return std::log1p(std::exp(-t));
  }
  return -t + std::log1p(std::exp(t));
}

}  // namespace ddc
