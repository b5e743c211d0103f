#include "ddc/sweep_config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddc/errors.hpp"

namespace ddc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + t + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + t + "'");
  return v;
}

}  // namespace

int model_size(double kappa, int n) { return static_cast<int>(std::lround(kappa * n)); }

std::vector<double> parse_kappa_grid(std::string_view text) {
  std::vector<double> grid;
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("kappa grid is empty");
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_number(item));
    if (parts.size() != 3) throw ConfigError("kappa range must be a:b:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0.0) || !(b >= a)) throw ConfigError("kappa range needs b >= a and step > 0");
    const long count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError("kappa range has too many points");
    for (long k = 0; k < count; ++k) grid.push_back(std::round((a + k * step) * 1e12) / 1e12);
  } else {
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(parse_number(item));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> drop_threshold_band(std::vector<double> grid) {
  std::erase_if(grid, [](double k) { return std::abs(k - 1.0) < square_grid_band; });
  return grid;
}

TestEval parse_test_eval(std::string_view text) {
  const std::string t = trim(text);
  if (t == "conditional") return TestEval::conditional();
  if (t.rfind("mc:", 0) == 0) {
    const double m = parse_number(t.substr(3));
    if (!(m >= 1.0) || m != std::floor(m)) throw ConfigError("mc:M needs a positive integer M");
    return TestEval::monte_carlo(static_cast<long>(m));
  }
  throw ConfigError("test-eval must be 'conditional' or 'mc:M'");
}

ModelKind parse_model(std::string_view text) {
  const std::string t = trim(text);
  if (t == "logistic") return ModelKind::Logistic;
  if (t == "gm") return ModelKind::GaussianMixture;
  throw ConfigError("model must be 'logistic' or 'gm'");
}

RuleKind parse_rule(std::string_view text) {
  const std::string t = trim(text);
  if (t == "linear") return RuleKind::Linear;
  if (t == "poly") return RuleKind::Polynomial;
  throw ConfigError("rule must be 'linear' or 'poly'");
}

LossSelection parse_loss(std::string_view text) {
  const std::string t = trim(text);
  if (t == "square") return LossSelection::Square;
  if (t == "logistic") return LossSelection::Logistic;
  if (t == "both") return LossSelection::Both;
  throw ConfigError("loss must be 'square', 'logistic' or 'both'");
}

std::vector<Loss> SweepConfig::losses() const {
  switch (loss) {
    case LossSelection::Square: return {Loss::Square};
    case LossSelection::Logistic: return {Loss::Logistic};
    case LossSelection::Both: return {Loss::Square, Loss::Logistic};
  }
  return {};
}

int SweepConfig::ambient_dimension() const {
  if (rule.kind == RuleKind::Linear) {
    return static_cast<int>(std::floor(rule.zeta * n + 1e-9));
  }
  if (ambient_dim > 0) return ambient_dim;
  const double top = kappa_grid.empty() ? 1.0 : kappa_grid.back();
  return std::max(1, model_size(top, n));
}

void SweepConfig::validate() const {
  try {
    model.validate();
    rule.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (n < 10) throw ConfigError("n must be >= 10");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (kappa_grid.empty()) throw ConfigError("kappa grid is empty");
  if (!std::is_sorted(kappa_grid.begin(), kappa_grid.end())) throw ConfigError("kappa grid must be sorted");
  if (test_eval.kind == TestEval::Kind::MonteCarlo && test_eval.samples < 1) {
    throw ConfigError("mc:M needs M >= 1");
  }
  const int d = ambient_dimension();
  const bool has_square = loss != LossSelection::Logistic;
  for (double k : kappa_grid) {
    if (!(k > 0.0)) throw ConfigError("kappa values must be positive");
    if (k > rule.max_kappa() * (1.0 + 1e-12)) {
      throw ConfigError("kappa=" + std::to_string(k) + " beyond the linear rule's domain (0, zeta]");
    }
    if (has_square && std::abs(k - 1.0) < square_grid_band) {
      throw ConfigError("kappa=" + std::to_string(k) + " lies in the excluded band around 1");
    }
    const int p = model_size(k, n);
    if (p < 1) throw ConfigError("kappa=" + std::to_string(k) + " gives p = 0 at this n");
    if (p > d) throw ConfigError("kappa=" + std::to_string(k) + " needs p > d=" + std::to_string(d));
  }
}

}  // namespace ddc
