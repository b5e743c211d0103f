#include "ddc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace ddc {

namespace {

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Series {
  std::string label;
  std::vector<const SweepRow*> rows;
};

// Rows grouped by tags in first-seen order; a drop in kappa inside a group
// starts a new series (concatenated sweeps).
std::vector<Series> split_series(const std::vector<SweepRow>& rows) {
  std::vector<Series> out;
  std::map<std::string, std::size_t> open;
  for (const auto& r : rows) {
    const std::string key = r.model + " / " + r.loss + " / " + r.rule;
    auto it = open.find(key);
    if (it == open.end() || out[it->second].rows.back()->kappa >= r.kappa) {
      out.push_back({key, {}});
      open[key] = out.size() - 1;
      it = open.find(key);
    }
    out[it->second].rows.push_back(&r);
  }
  return out;
}

}  // namespace

void emit_svg(const std::vector<SweepRow>& rows, std::ostream& out, const SvgOptions& opt) {
  if (rows.empty()) throw std::invalid_argument("emit_svg: no rows");

  double kmin = rows.front().kappa, kmax = kmin, ymax = 0.5;
  for (const auto& r : rows) {
    kmin = std::min(kmin, r.kappa);
    kmax = std::max(kmax, r.kappa);
    for (const auto& v : {r.emp_test_mean, r.theory_risk, opt.show_train ? r.emp_train_mean : std::nullopt}) {
      if (v) ymax = std::max(ymax, *v);
    }
  }
  if (opt.log_x && !(kmin > 0.0)) throw std::invalid_argument("emit_svg: log axis needs kappa > 0");
  if (kmax == kmin) {
    kmin *= 0.9;
    kmax *= 1.1;
  }
  ymax = std::ceil(ymax * 10.0) / 10.0;

  const double left = 70, right = 200, top = 40, bottom = 55;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto xmap = [&](double k) {
    const double t = opt.log_x ? (std::log(k) - std::log(kmin)) / (std::log(kmax) - std::log(kmin))
                               : (k - kmin) / (kmax - kmin);
    return left + t * pw;
  };
  auto ymap = [&](double v) { return top + ph * (1.0 - v / ymax); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(opt.title) << "</text>\n";

  // Axes and ticks.
  out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\"/>\n</g>\n";
  out << "<g class=\"ticks\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = ymax * i / 5.0;
    out << "<line x1=\"" << num(left - 4) << "\" x2=\"" << num(left) << "\" y1=\"" << num(ymap(v)) << "\" y2=\""
        << num(ymap(v)) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(ymap(v) + 4) << "\" text-anchor=\"end\">"
        << num(v) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double t = i / 5.0;
    const double k = opt.log_x ? std::exp(std::log(kmin) + t * (std::log(kmax) - std::log(kmin)))
                               : kmin + t * (kmax - kmin);
    const double x = xmap(k);
    out << "<line x1=\"" << num(x) << "\" x2=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" y2=\""
        << num(top + ph + 4) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">" << num(k)
        << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(opt.height - 12)
      << "\" text-anchor=\"middle\">kappa = p/n</text>\n";
  out << "<text x=\"18\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num(top + ph / 2) << ")\">test error</text>\n";

  if (kmin < 1.0 && kmax > 1.0) {
    const double x = xmap(1.0);
    out << "<line class=\"threshold\" x1=\"" << num(x) << "\" x2=\"" << num(x) << "\" y1=\"" << num(top)
        << "\" y2=\"" << num(top + ph) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    out << "<text class=\"threshold-label\" x=\"" << num(x + 4) << "\" y=\"" << num(top + 14)
        << "\" fill=\"gray\">interpolation threshold</text>\n";
  }

  const auto series = split_series(rows);
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& sr = series[si];
    const char* color = palette[si % std::size(palette)];
    out << "<g class=\"series\" stroke=\"" << color << "\" fill=\"none\">\n";

    // Theory polyline, broken across the threshold.
    std::string points;
    bool below = true;
    auto flush = [&] {
      if (!points.empty()) out << "<polyline class=\"theory\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
      points.clear();
    };
    for (const SweepRow* r : sr.rows) {
      if (!r->theory_risk) continue;
      if (below && r->kappa > 1.0) {
        flush();
        below = false;
      }
      points += num(xmap(r->kappa)) + "," + num(ymap(*r->theory_risk)) + " ";
    }
    flush();

    for (const SweepRow* r : sr.rows) {
      if (!r->emp_test_mean) continue;
      const double x = xmap(r->kappa), y = ymap(*r->emp_test_mean);
      out << "<path class=\"marker\" d=\"M" << num(x - 4) << ' ' << num(y - 4) << " L" << num(x + 4) << ' '
          << num(y + 4) << " M" << num(x - 4) << ' ' << num(y + 4) << " L" << num(x + 4) << ' ' << num(y - 4)
          << "\"/>\n";
    }
    if (opt.show_train) {
      for (const SweepRow* r : sr.rows) {
        if (!r->emp_train_mean) continue;
        out << "<rect class=\"train-marker\" x=\"" << num(xmap(r->kappa) - 3) << "\" y=\""
            << num(ymap(*r->emp_train_mean) - 3) << "\" width=\"6\" height=\"6\"/>\n";
      }
    }
    out << "</g>\n";

    const double ly = top + 10 + 18.0 * static_cast<double>(si);
    out << "<line x1=\"" << num(left + pw + 12) << "\" x2=\"" << num(left + pw + 32) << "\" y1=\"" << num(ly)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    out << "<text x=\"" << num(left + pw + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(sr.label)
        << " (s@max=" << num(sr.rows.back()->s) << ")</text>\n";
  }
  out << "</svg>\n";
}

void emit_svg(const std::vector<SweepRow>& rows, const std::string& path, const SvgOptions& opt) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_svg: cannot open '" + path + "' for writing");
  emit_svg(rows, f, opt);
  f.flush();
  if (!f) throw std::runtime_error("emit_svg: write to '" + path + "' failed");
}

}  // namespace ddc
