#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ddc::detail {

struct MinNormPoint {
  Eigen::VectorXd x;          // point of conv{rows of Z} closest to the origin
  Eigen::VectorXd weights;    // convex weights over the rows, x = Z^T weights
  std::vector<int> support;   // rows with nonzero weight
  double scale_squared = 0.0; // max_i ||z_i||^2
  int major_iterations = 0;
};

/// Wolfe's minimum-norm-point algorithm over the rows of Z.
///
/// Terminates when ||x||^2 - min_i z_i^T x <= gap_tol * max ||z_i||^2 or when
/// x collapses onto the origin. Throws ConvergenceError if neither happens
/// within the iteration budget.
MinNormPoint min_norm_point(const Eigen::MatrixXd& Z, double gap_tol = 1e-13);

}  // namespace ddc::detail
