#include "ddc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddc {

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> opt_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("write_csv: no rows");
  out << sweep_csv_header << '\n';
  for (const auto& r : rows) {
    out << format_real(r.kappa) << ',' << format_real(r.s) << ',' << r.p << ',' << r.n << ','
        << r.trials << ',' << cell(r.emp_test_mean) << ',' << cell(r.emp_test_std) << ','
        << cell(r.emp_train_mean) << ',' << cell(r.emp_sq_loss_mean) << ',' << cell(r.emp_norm_mean)
        << ',' << cell(r.theory_risk) << ',' << cell(r.theory_mu) << ',' << cell(r.theory_alpha)
        << ',' << cell(r.theory_rho) << ',' << cell(r.theory_norm) << ',' << r.model << ','
        << r.loss << ',' << r.rule << '\n';
  }
}

void write_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
  write_csv(rows, f);
  f.flush();
  if (!f) throw std::runtime_error("write_csv: write to '" + path + "' failed");
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != sweep_csv_header) {
    throw std::runtime_error("read_csv: unexpected header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 18) throw std::runtime_error("read_csv: expected 18 columns, got " + std::to_string(f.size()));
    SweepRow r;
    r.kappa = std::stod(f[0]);
    r.s = std::stod(f[1]);
    r.p = std::stoi(f[2]);
    r.n = std::stoi(f[3]);
    r.trials = std::stoi(f[4]);
    r.emp_test_mean = opt_real(f[5]);
    r.emp_test_std = opt_real(f[6]);
    r.emp_train_mean = opt_real(f[7]);
    r.emp_sq_loss_mean = opt_real(f[8]);
    r.emp_norm_mean = opt_real(f[9]);
    r.theory_risk = opt_real(f[10]);
    r.theory_mu = opt_real(f[11]);
    r.theory_alpha = opt_real(f[12]);
    r.theory_rho = opt_real(f[13]);
    r.theory_norm = opt_real(f[14]);
    r.model = f[15];
    r.loss = f[16];
    r.rule = f[17];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  return read_csv(f);
}

}  // namespace ddc
