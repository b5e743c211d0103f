#include "min_norm_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddc/errors.hpp"

namespace ddc::detail {

namespace {

// Corral of Wolfe's algorithm: an affinely independent subset of rows with
// their Gram matrix kept up to date on insertion and removal.
class Corral {
 public:
  explicit Corral(const Eigen::MatrixXd& Z) : Z_(Z) {}

  int size() const { return static_cast<int>(rows_.size()); }
  const std::vector<int>& rows() const { return rows_; }
  bool contains(int row) const { return std::find(rows_.begin(), rows_.end(), row) != rows_.end(); }

  void add(int row) {
    const int k = size();
    Eigen::MatrixXd grown(k + 1, k + 1);
    grown.topLeftCorner(k, k) = gram_;
    for (int a = 0; a < k; ++a) {
      const double v = Z_.row(rows_[a]).dot(Z_.row(row));
      grown(a, k) = v;
      grown(k, a) = v;
    }
    grown(k, k) = Z_.row(row).squaredNorm();
    gram_ = std::move(grown);
    rows_.push_back(row);
  }

  // Drops the members flagged in `keep == false`.
  void retain(const std::vector<bool>& keep) {
    std::vector<int> idx;
    for (int a = 0; a < size(); ++a)
      if (keep[a]) idx.push_back(a);
    Eigen::MatrixXd g(idx.size(), idx.size());
    std::vector<int> rows;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      rows.push_back(rows_[idx[a]]);
      for (std::size_t b = 0; b < idx.size(); ++b) g(a, b) = gram_(idx[a], idx[b]);
    }
    rows_ = std::move(rows);
    gram_ = std::move(g);
  }

  // Weights of the point of least norm in the affine hull of the corral.
  Eigen::VectorXd affine_minimizer() const {
    const int k = size();
    Eigen::MatrixXd a = gram_;
    a.array() += 1.0;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
    Eigen::VectorXd mu = a.ldlt().solve(ones);
    return mu / mu.sum();
  }

  Eigen::VectorXd combine(const Eigen::VectorXd& weights) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(Z_.cols());
    for (int a = 0; a < size(); ++a) x += weights(a) * Z_.row(rows_[a]).transpose();
    return x;
  }

 private:
  const Eigen::MatrixXd& Z_;
  std::vector<int> rows_;
  Eigen::MatrixXd gram_;
};

}  // namespace

MinNormPoint min_norm_point(const Eigen::MatrixXd& Z, double gap_tol) {
  const int n = static_cast<int>(Z.rows());
  if (n == 0) throw PreconditionError("min_norm_point: no points");

  const Eigen::VectorXd norms2 = Z.rowwise().squaredNorm();
  const double scale2 = norms2.maxCoeff();
  MinNormPoint out;
  out.scale_squared = scale2;
  if (scale2 == 0.0) {
    out.x = Eigen::VectorXd::Zero(Z.cols());
    out.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int i = 0; i < n; ++i) out.support.push_back(i);
    return out;
  }

  Corral corral(Z);
  int start = 0;
  norms2.minCoeff(&start);
  corral.add(start);
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x = Z.row(start).transpose();

  const double origin_tol2 = 1e-26 * scale2;
  const int max_major = 50 * n + 1000;
  int major = 0;
  for (; major < max_major; ++major) {
    const double xx = x.squaredNorm();
    if (xx <= origin_tol2) break;
    const Eigen::VectorXd proj = Z * x;
    int j = 0;
    const double best = proj.minCoeff(&j);
    if (xx - best <= gap_tol * scale2) break;
    if (corral.contains(j)) break;  // no further progress representable

    corral.add(j);
    lambda.conservativeResize(lambda.size() + 1);
    lambda(lambda.size() - 1) = 0.0;

    for (int minor = 0;; ++minor) {
      if (minor > n + 10) throw InternalError("min_norm_point: minor cycle does not terminate");
      const Eigen::VectorXd mu = corral.affine_minimizer();
      if (!mu.allFinite()) throw InternalError("min_norm_point: degenerate corral");
      if ((mu.array() > 0.0).all()) {
        lambda = mu;
        x = corral.combine(lambda);
        break;
      }
      // Walk from lambda toward mu until the first weight hits zero.
      double theta = std::numeric_limits<double>::infinity();
      int leaving = -1;
      for (int a = 0; a < mu.size(); ++a) {
        if (mu(a) <= 0.0) {
          const double t = lambda(a) / (lambda(a) - mu(a));
          if (t < theta) {
            theta = t;
            leaving = a;
          }
        }
      }
      lambda = (1.0 - theta) * lambda + theta * mu;
      std::vector<bool> keep(lambda.size());
      for (int a = 0; a < lambda.size(); ++a) keep[a] = a != leaving && lambda(a) > 1e-15;
      corral.retain(keep);
      Eigen::VectorXd kept(corral.size());
      for (int a = 0, b = 0; a < lambda.size(); ++a)
        if (keep[a]) kept(b++) = lambda(a);
      lambda = kept / kept.sum();
      x = corral.combine(lambda);
    }
  }
  if (major == max_major) {
    throw ConvergenceError("min_norm_point: iteration budget exhausted", std::sqrt(x.squaredNorm()),
                           false);
  }

  out.x = x;
  out.weights = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < corral.size(); ++a) out.weights(corral.rows()[a]) = lambda(a);
  out.support = corral.rows();
  out.major_iterations = major;
  return out;
}

}  // namespace ddc::detail
