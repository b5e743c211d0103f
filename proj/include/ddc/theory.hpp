#pragma once

#include "ddc/datagen.hpp"
#include "ddc/quadrature.hpp"

namespace ddc {

/// Limiting quantities of the square-loss GD classifier at one (kappa, r, s).
///
/// The fitted vector concentrates around (mu/s) beta0 with deviation of
/// squared size alpha^2 orthogonal to it; its norm tends to sqrt(mu^2 + alpha^2)
/// and its 0-1 risk depends on the effective noise rho = alpha / mu.
struct TheoryPoint {
  double kappa = 0.0;
  double r = 0.0;
  double s = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double risk = 0.0;
  double norm_prediction = 0.0;
  ModelKind model = ModelKind::GaussianMixture;
};

/// Half-width of the excluded band around the interpolation threshold.
inline constexpr double threshold_band = 1e-6;

/// nu(r) = 2 E_H[ exp(-rH) / (1 + exp(-rH))^2 ], H ~ N(0, 1).
double nu(double r, const quad::Options& opt = {});

/// GM data: mu = s/(1+s^2) or s/(kappa+s^2); risk Q(s / sqrt(1 + rho^2)).
TheoryPoint theory_gm(double kappa, double s);

/// Logistic data: mu = s nu or s nu / kappa; risk P(rho H + G Y < 0).
TheoryPoint theory_logistic(double kappa, double r, double s, const quad::Options& opt = {});

/// P(rho H + G Y < 0) with H, G, Z iid N(0,1), Y ~ Rad(f(sG + sqrt(r^2-s^2) Z)).
///
/// H is integrated out analytically and the pair (G, -G) folded together,
/// leaving E_G[ g(G) Phi(-G/rho) + (1 - g(G)) Phi(G/rho) ] with
/// g(G) = E_Z[ f(sG + sqrt(r^2 - s^2) Z) ]; both levels are adaptive
/// Gauss-Kronrod. rho = 0 uses the step limit, rho = inf returns 1/2.
double risk_logistic(double rho, double r, double s, const quad::Options& opt = {});

/// g(G) above: P(Y = +1 | G).
double logistic_label_probability(double g, double r, double s, const quad::Options& opt = {});

/// Dispatches on model; r is ignored for GM.
TheoryPoint theory_point(ModelKind model, double kappa, double r, double s);

}  // namespace ddc
