#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddc/datagen.hpp"
#include "ddc/solvers.hpp"

namespace ddc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class LossSelection { Square, Logistic, Both };

struct TestEval {
  enum class Kind { Conditional, MonteCarlo };
  Kind kind = Kind::Conditional;
  long samples = 0;  // MonteCarlo only

  static TestEval conditional() { return {}; }
  static TestEval monte_carlo(long m) { return {Kind::MonteCarlo, m}; }
};

/// Half-width of the band around kappa = 1 that square-loss grids must avoid.
inline constexpr double square_grid_band = 1e-3;

struct SweepConfig {
  DataModelSpec model;
  FeatureRule rule;
  LossSelection loss = LossSelection::Square;
  int n = 400;
  std::vector<double> kappa_grid;
  int trials = 100;
  std::uint64_t seed = 1;
  TestEval test_eval;
  std::string output_path;
  int threads = 1;
  // Polynomial rule only: ambient dimension d; 0 means round(max kappa * n).
  int ambient_dim = 0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  /// d used for the sweep's ground truth: floor(zeta n) for the linear rule.
  int ambient_dimension() const;

  std::vector<Loss> losses() const;
};

/// Model size for a given kappa: round(kappa n).
int model_size(double kappa, int n);

/// "a:b:step" (inclusive range) or "k1,k2,...". Values are returned sorted;
/// a range is rounded to 12 decimals to absorb step accumulation.
std::vector<double> parse_kappa_grid(std::string_view text);

/// Removes points with |kappa - 1| < square_grid_band.
std::vector<double> drop_threshold_band(std::vector<double> grid);

TestEval parse_test_eval(std::string_view text);
ModelKind parse_model(std::string_view text);
RuleKind parse_rule(std::string_view text);
LossSelection parse_loss(std::string_view text);

}  // namespace ddc
