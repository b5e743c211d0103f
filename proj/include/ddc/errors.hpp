#pragma once

#include <stdexcept>
#include <string>

namespace ddc {

/// Argument outside the mathematical domain of an operation
/// (kappa beyond the feature rule, p > d, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// kappa too close to the interpolation threshold for the closed-form
/// asymptotics; the limiting risk there is 1/2.
class NearSingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Gram matrix (W^T W or W W^T) not numerically invertible.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// Iterative solver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double gradient_norm, bool diverged)
      : std::runtime_error(what), gradient_norm_(gradient_norm), diverged_(diverged) {}
  double gradient_norm() const noexcept { return gradient_norm_; }
  bool diverged() const noexcept { return diverged_; }

 private:
  double gradient_norm_;
  bool diverged_;
};

/// Operation called on data that violates its precondition
/// (e.g. max-margin on non-separable data).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Classifier/ground-truth correlation exceeds 1 beyond rounding.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ddc
