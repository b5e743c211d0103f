#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "ddc/csv.hpp"
#include "ddc/errors.hpp"
#include "ddc/harness.hpp"
#include "ddc/metrics.hpp"
#include "ddc/svg.hpp"
#include "xml_check.hpp"

using namespace ddc;

namespace {

SweepConfig small_gm() {
  SweepConfig cfg;
  cfg.model = {ModelKind::GaussianMixture, 2.0, 0.5};
  cfg.rule = FeatureRule::linear(5.0);
  cfg.n = 40;
  cfg.trials = 6;
  cfg.seed = 17;
  cfg.kappa_grid = {0.25, 0.5, 1.5, 3.0};
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("SweepConfig validation") {
  auto cfg = small_gm();
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.n = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.kappa_grid = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.kappa_grid = {0.5, 1.0005};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.loss = LossSelection::Logistic;
  CHECK_NOTHROW(bad.validate());
  bad = cfg;
  bad.kappa_grid = {0.5, 6.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.kappa_grid = {2.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.model.r = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(cfg.ambient_dimension() == 200);
}

TEST_CASE("kappa grid parsing") {
  CHECK(parse_kappa_grid("0.5,0.25, 2") == std::vector<double>{0.25, 0.5, 2.0});
  const auto range = parse_kappa_grid("0.1:0.5:0.1");
  REQUIRE(range.size() == 5);
  CHECK(range[2] == 0.3);
  CHECK(range.back() == 0.5);
  CHECK(drop_threshold_band(parse_kappa_grid("0.9:1.1:0.1")) == std::vector<double>{0.9, 1.1});
  CHECK_THROWS_AS(parse_kappa_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_kappa_grid("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_kappa_grid("1:0.5:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_kappa_grid("0.5,x"), ConfigError);
  CHECK(parse_test_eval("mc:5000").samples == 5000);
  CHECK(parse_test_eval("conditional").kind == TestEval::Kind::Conditional);
  CHECK_THROWS_AS(parse_test_eval("mc:0"), ConfigError);
  CHECK_THROWS_AS(parse_loss("hinge"), ConfigError);
  CHECK(model_size(0.75, 400) == 300);
  CHECK(model_size(1.0 / 3.0, 100) == 33);
}

TEST_CASE("run_trial is deterministic") {
  const Experiment exp(small_gm());
  const auto a = exp.run_trial(1.5, 3);
  const auto b = exp.run_trial(1.5, 3);
  REQUIRE(a.size() == 1);
  CHECK(a[0].beta_hat == b[0].beta_hat);
  CHECK(a[0].test_error == b[0].test_error);
  CHECK(a[0].norm == b[0].norm);
  CHECK(exp.run_trial(1.5, 4)[0].beta_hat != a[0].beta_hat);
}

TEST_CASE("run_trial beyond the threshold interpolates") {
  auto cfg = small_gm();
  cfg.n = 100;
  const Experiment exp(cfg);
  for (int t = 0; t < 10; ++t) {
    const auto rec = exp.run_trial(2.0, t)[0];
    CHECK(rec.ok);
    CHECK(rec.regime == Regime::Overparametrized);
    CHECK(rec.train_error == 0.0);
    CHECK(rec.square_loss <= 1e-12);
  }
}

TEST_CASE("run_trial record matches recomputation from the saved estimate") {
  for (auto kind : {ModelKind::GaussianMixture, ModelKind::Logistic}) {
    auto cfg = small_gm();
    cfg.model.kind = kind;
    cfg.loss = LossSelection::Both;
    const Experiment exp(cfg);
    for (double k : {0.5, 3.0}) {
      for (const auto& rec : exp.run_trial(k, 1)) {
        REQUIRE(rec.ok);
        const double expect =
            kind == ModelKind::GaussianMixture
                ? test_error_gm_conditional(rec.beta_hat, rec.beta0).value
                : test_error_logistic_conditional(rec.beta_hat, rec.beta0, 2.0, rec.beta0.norm()).value;
        CHECK(rec.test_error == expect);
        CHECK(rec.norm == rec.beta_hat.norm());
        CHECK(rec.p == model_size(k, cfg.n));
        CHECK(rec.kappa == static_cast<double>(rec.p) / cfg.n);
        if (rec.loss == Loss::Square) {
          const auto tp = *exp.theory_at(rec.p);
          CHECK(rec.centering == doctest::Approx((rec.beta_hat - (tp.mu / rec.s) * rec.beta0).squaredNorm()));
        } else {
          CHECK(std::isnan(rec.centering));
        }
      }
    }
  }
}

TEST_CASE("trials = 1 sweep rows equal the single trial records") {
  auto cfg = small_gm();
  cfg.trials = 1;
  const Experiment exp(cfg);
  const auto rows = exp.run_sweep();
  REQUIRE(rows.size() == cfg.kappa_grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto rec = exp.run_trial(cfg.kappa_grid[i], 0)[0];
    CHECK(*rows[i].emp_test_mean == rec.test_error);
    CHECK(*rows[i].emp_train_mean == rec.train_error);
    CHECK(*rows[i].emp_sq_loss_mean == rec.square_loss);
    CHECK(*rows[i].emp_norm_mean == rec.norm);
    CHECK(*rows[i].emp_test_std == 0.0);
    CHECK(rows[i].trials == 1);
  }
}

TEST_CASE("sweep aggregation, theory pass-through and row layout") {
  auto cfg = small_gm();
  cfg.loss = LossSelection::Both;
  cfg.kappa_grid = {0.25, 0.5, 0.51, 1.5, 3.0};  // 0.5 and 0.51 share p = 20
  const Experiment exp(cfg);
  const auto rows = exp.run_sweep();
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    CHECK(row.loss == (i % 2 == 0 ? "square" : "logistic"));
    CHECK(row.p == static_cast<int>(std::lround(row.kappa * cfg.n)));
    CHECK(row.model == "gm");
    CHECK(row.rule == "linear");
    CHECK(row.valid);
    CHECK(row.trials == cfg.trials);
    for (const auto& v : {row.emp_test_mean, row.emp_train_mean}) CHECK((*v >= 0.0 && *v <= 1.0));
    if (row.loss == "square") {
      const auto tp = theory_gm(row.kappa, row.s);
      CHECK(*row.theory_risk == tp.risk);
      CHECK(*row.theory_mu == tp.mu);
      CHECK(*row.theory_alpha == tp.alpha);
      CHECK(*row.theory_rho == tp.rho);
      CHECK(*row.theory_norm == tp.norm_prediction);
    } else {
      CHECK_FALSE(row.theory_risk.has_value());
    }
    if (i >= 2) CHECK(row.kappa >= rows[i - 2].kappa);
  }
  // Mean and sample std over the per-trial records.
  std::vector<double> v;
  for (int t = 0; t < cfg.trials; ++t) v.push_back(exp.run_trial(1.5, t)[0].test_error);
  double m = 0, ss = 0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) ss += (x - m) * (x - m);
  CHECK(*rows[4].emp_test_mean == doctest::Approx(m).epsilon(1e-14));
  CHECK(*rows[4].emp_test_std == doctest::Approx(std::sqrt(ss / (v.size() - 1))).epsilon(1e-12));
}

TEST_CASE("aggregate marks cells with more than 10% failures invalid") {
  auto cfg = small_gm();
  std::vector<TrialRecord> recs(10);
  for (int i = 0; i < 10; ++i) {
    recs[i].kappa = 0.5;
    recs[i].p = 20;
    recs[i].n = 40;
    recs[i].test_error = 0.3;
    recs[i].ok = i != 0;
  }
  auto row = aggregate(recs, cfg, std::nullopt);
  CHECK(row.valid);
  CHECK(row.failed_trials == 1);
  CHECK(row.trials == 9);
  CHECK(*row.emp_test_mean == doctest::Approx(0.3));
  recs[1].ok = false;
  row = aggregate(recs, cfg, std::nullopt);
  CHECK_FALSE(row.valid);
  CHECK_FALSE(row.emp_test_mean.has_value());
}

TEST_CASE("sweeps are identical across thread counts") {
  auto cfg = small_gm();
  cfg.model.kind = ModelKind::Logistic;
  cfg.loss = LossSelection::Both;
  std::ostringstream one, four;
  write_csv(run_sweep(cfg), one);
  cfg.threads = 4;
  write_csv(run_sweep(cfg), four);
  CHECK(one.str() == four.str());
}

TEST_CASE("Monte Carlo test evaluation tracks the conditional value") {
  auto cfg = small_gm();
  cfg.kappa_grid = {0.5, 2.0};
  cfg.trials = 3;
  const auto exact = run_sweep(cfg);
  cfg.test_eval = TestEval::monte_carlo(200000);
  const auto mc = run_sweep(cfg);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CHECK(std::abs(*mc[i].emp_test_mean - *exact[i].emp_test_mean) <= 4.0 * std::sqrt(0.25 / 200000.0));
    CHECK(*mc[i].emp_norm_mean == *exact[i].emp_norm_mean);
  }
}

TEST_CASE("polynomial-rule sweep uses the residual signal") {
  SweepConfig cfg;
  cfg.model = {ModelKind::Logistic, 2.0, 0.5};
  cfg.rule = FeatureRule::polynomial(2.0);
  cfg.n = 40;
  cfg.trials = 2;
  cfg.kappa_grid = {0.5, 2.0};
  const Experiment exp(cfg);
  CHECK(exp.ground_truth().d == 80);
  CHECK(exp.ground_truth().residual_variance > 0.0);
  const auto rows = exp.run_sweep();
  CHECK(*rows[1].theory_risk == theory_logistic(2.0, 2.0, signal_strength(cfg.rule, 2.0, 2.0)).risk);
  cfg.ambient_dim = 400;
  CHECK(Experiment(cfg).ground_truth().d == 400);
}

TEST_CASE("CSV header, formatting and round trip") {
  auto cfg = small_gm();
  cfg.loss = LossSelection::Both;
  const auto rows = run_sweep(cfg);
  std::ostringstream out;
  write_csv(rows, out);
  const std::string text = out.str();
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "kappa,s,p,n,trials,emp_test_mean,emp_test_std,emp_train_mean,emp_sq_loss_mean,emp_norm_mean,"
        "theory_risk,theory_mu,theory_alpha,theory_rho,theory_norm,model,loss,rule");
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 17);
    ++count;
  }
  CHECK(count == static_cast<int>(rows.size()));
  CHECK(format_real(0.1234567890123) == "0.123456789");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(1.5e-30) == "1.5e-30");

  std::istringstream in(text);
  const auto back = read_csv(in);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].kappa == doctest::Approx(rows[i].kappa).epsilon(1e-10));
    CHECK(back[i].p == rows[i].p);
    CHECK(*back[i].emp_test_mean == doctest::Approx(*rows[i].emp_test_mean).epsilon(1e-9));
    CHECK(back[i].theory_risk.has_value() == rows[i].theory_risk.has_value());
    if (rows[i].theory_risk) CHECK(*back[i].theory_risk == doctest::Approx(*rows[i].theory_risk).epsilon(1e-9));
    CHECK(back[i].loss == rows[i].loss);
  }
  // Logistic rows leave the theory block empty.
  CHECK(text.find(",,,,,gm,logistic,linear") != std::string::npos);
}

TEST_CASE("CSV files are byte-identical across repeated runs") {
  const auto dir = std::filesystem::temp_directory_path() / "ddc_csv_repeat";
  std::filesystem::create_directories(dir);
  write_csv(run_sweep(small_gm()), (dir / "a.csv").string());
  write_csv(run_sweep(small_gm()), (dir / "b.csv").string());
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK_THROWS(write_csv(run_sweep(small_gm()), (dir / "missing" / "x.csv").string()));
  CHECK_THROWS(write_csv({}, (dir / "c.csv").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("SVG output") {
  auto cfg = small_gm();
  cfg.loss = LossSelection::Both;
  const auto rows = run_sweep(cfg);
  for (bool log_x : {false, true}) {
    SvgOptions opt;
    opt.log_x = log_x;
    opt.show_train = true;
    opt.title = "GM <sweep> & more";
    std::ostringstream out;
    emit_svg(rows, out, opt);
    const std::string svg = out.str();
    CHECK(xml_check::well_formed(svg));
    const std::regex marker("class=\"marker\"");
    const auto markers = std::distance(std::sregex_iterator(svg.begin(), svg.end(), marker), std::sregex_iterator());
    CHECK(markers == static_cast<long>(rows.size()));
    CHECK(svg.find("class=\"threshold\"") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("interpolation threshold") != std::string::npos);
    CHECK(svg.find("GM &lt;sweep&gt; &amp; more") != std::string::npos);
  }
  // No threshold rule when the grid stays on one side.
  cfg.kappa_grid = {1.5, 3.0};
  std::ostringstream out;
  emit_svg(run_sweep(cfg), out);
  CHECK(out.str().find("interpolation threshold") == std::string::npos);
  CHECK(xml_check::well_formed(out.str()));
  CHECK_THROWS(emit_svg({}, out));
}

TEST_CASE("xml checker rejects malformed documents") {
  CHECK(xml_check::well_formed("<?xml version=\"1.0\"?>\n<a x=\"1\"><b/><c>t &amp; u</c></a>"));
  CHECK_FALSE(xml_check::well_formed("<a><b></a></b>"));
  CHECK_FALSE(xml_check::well_formed("<a x=1/>"));
  CHECK_FALSE(xml_check::well_formed("<a>&</a>"));
  CHECK_FALSE(xml_check::well_formed("<a/><b/>"));
}
