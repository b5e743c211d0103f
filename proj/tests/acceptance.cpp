// End-to-end acceptance run: every criterion prints one PASS/FAIL line,
// indented detail lines follow it. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ddc/csv.hpp"
#include "ddc/datagen.hpp"
#include "ddc/harness.hpp"
#include "ddc/metrics.hpp"
#include "ddc/solvers.hpp"
#include "ddc/theory.hpp"
#include "oracles.hpp"

using namespace ddc;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<double> protocol_grid{0.25, 0.5, 0.75, 0.9, 1.1, 1.25, 2.0, 3.0, 5.0};

SweepConfig protocol(ModelKind model, FeatureRule rule, double r) {
  SweepConfig cfg;
  cfg.model = {model, r, 0.5};
  cfg.rule = rule;
  cfg.n = 400;
  cfg.trials = 100;
  cfg.seed = 20240601;
  cfg.kappa_grid = protocol_grid;
  return cfg;
}

void check_against_theory(Outcome& out, const std::vector<SweepRow>& rows, const std::string& tag) {
  for (const auto& row : rows) {
    if (!row.valid || !row.emp_test_mean || !row.theory_risk) {
      out.require(false, fmt("%s kappa=%.4g: missing empirical or theory value", tag.c_str(), row.kappa));
      continue;
    }
    const double tol = std::max(3.0 * *row.emp_test_std / std::sqrt(static_cast<double>(row.trials)), 0.015);
    const double gap = std::abs(*row.emp_test_mean - *row.theory_risk);
    out.require(gap <= tol, fmt("%s kappa=%.4g emp=%.5f theory=%.5f gap=%.5f tol=%.5f", tag.c_str(), row.kappa,
                                *row.emp_test_mean, *row.theory_risk, gap, tol));
  }
}

Outcome ac1() {
  Outcome out;
  const auto rows = run_sweep(protocol(ModelKind::GaussianMixture, FeatureRule::linear(5.0), 2.0));
  check_against_theory(out, rows, "gm r=2");
  return out;
}

Outcome ac2() {
  Outcome out;
  for (double r : {1.0, 5.0}) {
    const auto rule = FeatureRule::polynomial(2.0);
    const auto rows = run_sweep(protocol(ModelKind::Logistic, rule, r));
    const std::string tag = fmt("logistic r=%g", r);
    check_against_theory(out, rows, tag);

    // Shape on a fine theory grid.
    std::vector<double> below, above;
    double min_below = 1.0, peak = 0.0, peak_kappa = 0.0;
    int argmin = -1;
    for (int i = 1; i <= 99; ++i) {
      const double k = i / 100.0;
      const double v = theory_logistic(k, r, signal_strength(rule, k, r)).risk;
      below.push_back(v);
      if (v < min_below) {
        min_below = v;
        argmin = i;
      }
    }
    for (int i = 1; i <= 400; ++i) {
      const double k = 1.0 + i / 100.0;
      above.push_back(theory_logistic(k, r, signal_strength(rule, k, r)).risk);
    }
    for (double k : {0.99, 1.01}) {
      const double v = theory_logistic(k, r, signal_strength(rule, k, r)).risk;
      if (v > peak) {
        peak = v;
        peak_kappa = k;
      }
    }
    double elsewhere = 0.0;
    for (std::size_t i = 0; i + 1 < below.size(); ++i) elsewhere = std::max(elsewhere, below[i]);
    for (std::size_t i = 1; i < above.size(); ++i) elsewhere = std::max(elsewhere, above[i]);
    out.require(argmin > 1 && argmin < 99 && below.front() > min_below && below.back() > min_below,
                fmt("%s U-shape below 1: theory minimum %.5f at kappa=%.2f", tag.c_str(), min_below, argmin / 100.0));
    out.require(peak > elsewhere,
                fmt("%s peak near 1: %.5f at kappa=%.2f, max elsewhere %.5f", tag.c_str(), peak, peak_kappa, elsewhere));
    out.require(above[0] > above[9] && above[9] > above[24],
                fmt("%s second descent: %.5f (1.01) > %.5f (1.10) > %.5f (1.25)", tag.c_str(), above[0], above[9],
                    above[24]));

    // The empirical curve peaks at a grid point adjacent to the threshold.
    double emp_peak = 0.0, emp_peak_kappa = 0.0;
    for (const auto& row : rows) {
      if (row.emp_test_mean && *row.emp_test_mean > emp_peak) {
        emp_peak = *row.emp_test_mean;
        emp_peak_kappa = row.kappa;
      }
    }
    out.require(emp_peak_kappa == 0.9 || emp_peak_kappa == 1.1,
                fmt("%s empirical peak %.5f at kappa=%.3g", tag.c_str(), emp_peak, emp_peak_kappa));
  }
  return out;
}

Outcome ac3() {
  Outcome out;
  const int n = 200;
  const auto rule = FeatureRule::linear(5.0);
  const auto gt = build_ground_truth(1000, n, rule, 2.0);
  const DataModelSpec model{ModelKind::GaussianMixture, 2.0, 0.5};
  int interpolating = 0, unique_ls = 0;
  double worst_loss = 0.0, worst_normal = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto rng1 = derive_stream(3, 1.5, static_cast<std::uint64_t>(t));
    const auto over = sample(model, n, 300, gt, rng1);
    const auto e1 = fit_square_loss(over);
    const double loss = empirical_square_loss(e1.beta_hat, over.W, over.y);
    worst_loss = std::max(worst_loss, loss);
    if (e1.regime == Regime::Overparametrized && loss <= 1e-12 && training_error(e1, over) == 0.0) ++interpolating;

    auto rng2 = derive_stream(3, 0.5, static_cast<std::uint64_t>(t));
    const auto under = sample(model, n, 100, gt, rng2);
    const auto e2 = fit_square_loss(under);
    const double normal = (under.W.transpose() * (under.y - under.W * e2.beta_hat)).lpNorm<Eigen::Infinity>();
    worst_normal = std::max(worst_normal, normal);
    if (e2.regime == Regime::Underparametrized && normal <= 1e-8) ++unique_ls;
  }
  out.require(interpolating == 100,
              fmt("kappa=1.5: %d/100 trials interpolate (worst square loss %.3g)", interpolating, worst_loss));
  out.require(unique_ls == 100,
              fmt("kappa=0.5: %d/100 trials give the LS solution (worst normal residual %.3g)", unique_ls, worst_normal));
  return out;
}

Outcome ac4() {
  Outcome out;
  const auto rule = FeatureRule::linear(5.0);
  for (double k : {0.99, 1.01}) {
    const double s = signal_strength(rule, k, 2.0);
    const double gm = theory_gm(k, s).risk;
    const double lg = theory_logistic(k, 2.0, s).risk;
    out.require(gm >= 0.45, fmt("theory_gm kappa=%.2f risk=%.5f", k, gm));
    out.require(lg >= 0.45, fmt("theory_logistic kappa=%.2f risk=%.5f", k, lg));
  }
  for (auto kind : {ModelKind::GaussianMixture, ModelKind::Logistic}) {
    auto cfg = protocol(kind, rule, 2.0);
    cfg.kappa_grid = {0.95, 1.05};
    for (const auto& row : run_sweep(cfg)) {
      const bool ok = row.emp_test_mean && *row.emp_test_mean >= 0.40;
      out.require(ok, fmt("%s empirical kappa=%.3g mean test error %.5f", row.model.c_str(), row.kappa,
                          row.emp_test_mean.value_or(std::nan(""))));
    }
  }
  return out;
}

Outcome ac5() {
  Outcome out;
  auto cfg = protocol(ModelKind::GaussianMixture, FeatureRule::linear(5.0), 2.0);
  cfg.kappa_grid = {0.5, 2.0};
  for (const auto& row : run_sweep(cfg)) {
    const double norm_gap = std::abs(*row.emp_norm_mean - *row.theory_norm);
    const double alpha2 = *row.theory_alpha * *row.theory_alpha;
    const double centre_gap = std::abs(*row.emp_centering_mean - alpha2);
    out.require(norm_gap <= 0.05, fmt("kappa=%.3g mean norm %.5f vs %.5f (gap %.5f)", row.kappa, *row.emp_norm_mean,
                                      *row.theory_norm, norm_gap));
    out.require(centre_gap <= 0.1, fmt("kappa=%.3g centering %.5f vs alpha^2 %.5f (gap %.5f)", row.kappa,
                                       *row.emp_centering_mean, alpha2, centre_gap));
  }
  return out;
}

Outcome ac6() {
  Outcome out;
  std::mt19937_64 g(606);
  double ls = 0, mn = 0, gd_under = 0, gd_over = 0, mm = 0, kkt = 0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXd tall = oracle::gaussian_matrix(40, 15, g);
    const Eigen::VectorXd yt = oracle::random_labels(40, g);
    const Eigen::VectorXd b_ls = solve_ls_under(tall, yt);
    ls = std::max(ls, oracle::rel_err(b_ls, oracle::pinv_solve(tall, yt)));

    const Eigen::MatrixXd wide = oracle::gaussian_matrix(15, 40, g);
    const Eigen::VectorXd yw = oracle::random_labels(15, g);
    const Eigen::VectorXd b_mn = solve_min_norm(wide, yw);
    mn = std::max(mn, oracle::rel_err(b_mn, oracle::pinv_solve(wide, yw)));

    for (const auto* W : {&tall, &wide}) {
      const Eigen::VectorXd& y = W == &tall ? yt : yw;
      const double step = 0.9 / gram_top_eigenvalue(*W, 2.0);
      const auto gd = gd_square(*W, y, step, 1e-11, 5'000'000);
      const double gap = (gd.beta_hat - fit_square_loss(*W, y).beta_hat).lpNorm<Eigen::Infinity>();
      (W == &tall ? gd_under : gd_over) = std::max(W == &tall ? gd_under : gd_over, gap);
    }

    const Eigen::MatrixXd sep = oracle::gaussian_matrix(10, 25, g);
    const Eigen::VectorXd ys = oracle::random_labels(10, g);
    const auto sol = max_margin(sep, ys);
    const double qp = oracle::max_margin_qp_objective(sep, ys);
    mm = std::max(mm, std::abs(0.5 * sol.beta.squaredNorm() - qp) / std::max(1.0, qp));
    kkt = std::max(kkt, sol.kkt_residual);
  }
  out.require(ls <= 1e-10, fmt("solve_ls_under vs pseudoinverse: worst relative error %.3g", ls));
  out.require(mn <= 1e-10, fmt("solve_min_norm vs pseudoinverse: worst relative error %.3g", mn));
  out.require(gd_under <= 1e-5, fmt("gd_square vs exact (n > p): worst gap %.3g", gd_under));
  out.require(gd_over <= 1e-5, fmt("gd_square vs exact (p > n): worst gap %.3g", gd_over));
  out.require(mm <= 1e-6, fmt("solve_max_margin vs QP oracle objective: worst gap %.3g (KKT %.3g)", mm, kkt));
  return out;
}

Outcome ac7() {
  Outcome out;
  out.require(nu(0.0) == 0.5, fmt("nu(0) = %.17g", nu(0.0)));
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    const double a = nu(r), b = oracle::nu_tanh_sinh(r);
    out.require(std::abs(a - b) <= 1e-8, fmt("nu(%g) = %.15f, oracle %.15f, gap %.3g", r, a, b, std::abs(a - b)));
  }
  std::uint64_t seed = 7000;
  for (double rho : {0.5, 1.0, 2.0}) {
    for (double r : {1.0, 2.0, 5.0}) {
      const double s = 0.75 * r;
      const double exact = risk_logistic(rho, r, s);
      const auto mc = oracle::risk_logistic_mc(rho, r, s, 10'000'000, ++seed);
      const double z = std::abs(exact - mc.value) / mc.std_error;
      out.require(z <= 4.0, fmt("risk_logistic(rho=%g, r=%g, s=%g) = %.6f, MC %.6f, %.2f SE", rho, r, s, exact,
                                mc.value, z));
    }
  }
  return out;
}

Outcome ac8() {
  Outcome out;
  std::mt19937_64 g(808);
  const int n = 100;
  const auto gt = build_ground_truth(500, n, FeatureRule::linear(5.0), 2.0);
  double worst_gm = 0.0, worst_lg = 0.0;
  for (double k : {0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 3.0, 5.0}) {
    const int p = model_size(k, n);
    const Eigen::VectorXd beta0 = gt.eta0.head(p);
    const double s = beta0.norm();
    Eigen::VectorXd u = oracle::gaussian_matrix(p, 1, g).col(0);
    u -= beta0 * (beta0.dot(u) / beta0.squaredNorm());
    u.normalize();
    const double kappa = static_cast<double>(p) / n;
    const auto tg = theory_gm(kappa, s);
    worst_gm = std::max(worst_gm,
                        std::abs(test_error_gm_conditional((tg.mu / s) * beta0 + tg.alpha * u, beta0).value - tg.risk));
    const auto tl = theory_logistic(kappa, 2.0, s);
    worst_lg = std::max(worst_lg, std::abs(test_error_logistic_conditional((tl.mu / s) * beta0 + tl.alpha * u, beta0,
                                                                           2.0, s).value - tl.risk));
  }
  out.require(worst_gm <= 1e-10, fmt("GM: worst |theory - conditional| = %.3g", worst_gm));
  out.require(worst_lg <= 1e-6, fmt("logistic: worst |theory - conditional| = %.3g", worst_lg));
  return out;
}

Outcome ac9() {
  Outcome out;
  const double r = 2.0;
  const std::vector<double> zetas{5.0, 2.5, 5.0 / 3.0};  // n = d/5, 2d/5, 3d/5
  auto risk = [&](double zeta, double t) {
    const double kappa = t * zeta;
    return theory_logistic(kappa, r, signal_strength(FeatureRule::linear(zeta), kappa, r)).risk;
  };
  int worse = 0, better = 0;
  double example_t = 0.0, example_big = 0.0, example_small = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double t = i / 100.0;
    bool skip = false;
    for (double z : zetas) skip = skip || std::abs(t * z - 1.0) < 1e-3;
    if (skip) continue;
    const double big_n = risk(zetas.back(), t), small_n = risk(zetas.front(), t);
    if (big_n > small_n) {
      if (worse == 0 || big_n - small_n > example_big - example_small) {
        example_t = t;
        example_big = big_n;
        example_small = small_n;
      }
      ++worse;
    } else if (big_n < small_n) {
      ++better;
    }
  }
  out.require(worse > 0, fmt("largest n worse at %d of the p/d grid points; widest at p/d=%.2f (%.5f vs %.5f)", worse,
                             example_t, example_big, example_small));
  out.require(better > 0, fmt("largest n better at %d grid points, so the curves cross", better));
  return out;
}

Outcome ac10() {
  Outcome out;
  SweepConfig cfg;
  cfg.model = {ModelKind::Logistic, 2.0, 0.5};
  cfg.rule = FeatureRule::polynomial(2.0);
  cfg.loss = LossSelection::Both;
  cfg.n = 120;
  cfg.trials = 20;
  cfg.seed = 99;
  cfg.test_eval = TestEval::monte_carlo(2000);
  cfg.kappa_grid = {0.3, 0.8, 1.2, 2.5};
  const auto dir = std::filesystem::temp_directory_path() / "ddc_acceptance";
  std::filesystem::create_directories(dir);
  const auto a = dir / "first.csv", b = dir / "second.csv";
  write_csv(run_sweep(cfg), a.string());
  write_csv(run_sweep(cfg), b.string());
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string x = slurp(a), y = slurp(b);
  out.require(!x.empty() && x == y, fmt("two runs: %zu and %zu bytes, identical=%s", x.size(), y.size(),
                                        x == y ? "yes" : "no"));
  std::filesystem::remove_all(dir);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 theory vs simulation, GM data, square loss", ac1},
      {"AC2 theory vs simulation, logistic data, polynomial rule", ac2},
      {"AC3 interpolation-threshold phase transition", ac3},
      {"AC4 peak at kappa = 1", ac4},
      {"AC5 norm and centering predictions", ac5},
      {"AC6 solver oracle equivalence", ac6},
      {"AC7 quadrature correctness", ac7},
      {"AC8 consistency identities", ac8},
      {"AC9 sample-size crossing", ac9},
      {"AC10 determinism", ac10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", name.c_str(), secs);
    for (const auto& d : out.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
