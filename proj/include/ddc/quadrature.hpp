#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ddc/special.hpp"

namespace ddc::quad {

struct Options {
  double abs_tol = 1e-14;
  double rel_tol = 1e-13;
  int max_subintervals = 2000;
  // Initial panel width; integrand features narrower than this are found
  // by bisection once a panel's Kronrod/Gauss discrepancy exposes them.
  double initial_panel = 0.5;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int subintervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double kronrod_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kronrod_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kronrod_nodes[1], [3], [5], [7].
inline constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[j] * sum;
    if (j % 2 == 1) {
      gauss += gauss_weights[j / 2] * sum;
    }
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive G7/K15 quadrature of f over [a, b]. Breakpoints inside
/// (a, b) always become panel boundaries, so kinks and steps placed there
/// are integrated exactly by the smooth rule on either side. b < a flips
/// the sign; NaN limits throw std::invalid_argument.
template <class F>
Result integrate(F&& f, double a, double b, std::span<const double> breakpoints = {},
                 const Options& opt = {}) {
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate: NaN limit");
  if (a == b) return {};
  if (b < a) {
    Result r = integrate(f, b, a, breakpoints, opt);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a, b};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<detail::Panel> heap;
  auto by_error = [](const detail::Panel& x, const detail::Panel& y) { return x.error < y.error; };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / opt.initial_panel)));
    const double h = (hi - lo) / pieces;
    for (int j = 0; j < pieces; ++j) {
      const double pa = lo + j * h;
      const double pb = (j + 1 == pieces) ? hi : lo + (j + 1) * h;
      heap.push_back(detail::kronrod15(f, pa, pb));
    }
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto totals = [&heap] {
    double v = 0.0, e = 0.0;
    for (const auto& p : heap) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  auto [value, error] = totals();
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value)) &&
         static_cast<int>(heap.size()) < opt.max_subintervals) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // No more resolution available in double precision.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    const detail::Panel left = detail::kronrod15(f, worst.a, mid);
    const detail::Panel right = detail::kronrod15(f, mid, worst.b);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }
  // Re-sum to drop the drift of the running totals.
  std::tie(value, error) = totals();
  return {value, error, static_cast<int>(heap.size())};
}

/// Half-width of the truncated real line used for standard-normal
/// expectations; the tail mass beyond it is 2 Q(12) ~ 3.6e-33.
inline constexpr double gaussian_cutoff = 12.0;

/// E[f(X)] for X ~ N(0, 1). `breakpoints` lists points where f is not smooth.
template <class F>
double gaussian_expectation(F&& f, std::span<const double> breakpoints = {},
                            const Options& opt = {}) {
  auto weighted = [&f](double x) { return f(x) * gaussian_pdf(x); };
  return integrate(weighted, -gaussian_cutoff, gaussian_cutoff, breakpoints, opt).value;
}

}  // namespace ddc::quad
