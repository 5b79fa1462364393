#pragma once

#include "errors.hpp"
#include "math.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

namespace quermass {

namespace detail {

template <class F>
double adaptive_simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                             double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
  if (a == b) {
    return 0.0;
  }
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Composite Simpson rule over uniformly spaced samples; needs an even number of intervals.
inline double composite_simpson(std::span<const double> values, double h) {
  const std::size_t intervals = values.size() - 1;
  if (values.size() < 3 || intervals % 2 != 0) {
    throw domain_error("composite_simpson: need an even number (>= 2) of intervals");
  }
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    (i % 2 == 1 ? odd : even) += values[i];
  }
  return h / 3.0 * (values.front() + 4.0 * odd + 2.0 * even + values.back());
}

/// Gauss-Legendre nodes and weights on [-1, 1], m points.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int m) {
  if (m < 1) {
    throw domain_error("gauss_legendre: need at least one node");
  }
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  return rule;
}

/// \int_a^b sin^n(r) dr by 32-point Gauss-Legendre on panels of width at most pi/8,
/// or 8 points below width 1e-2. Accurate to a few ulps relative to the result.
inline double sin_power_segment(int n, double a, double b) {
  if (n < 0) {
    throw domain_error("sin_power_segment: n must be nonnegative");
  }
  if (a == b) {
    return 0.0;
  }
  static const GaussRule wide = gauss_legendre(32);
  static const GaussRule narrow = gauss_legendre(8);
  const auto& rule = std::abs(b - a) < 1e-2 ? narrow : wide;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / (std::numbers::pi / 8.0))));
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + width * (p + 0.5);
    double part = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      part += rule.weights[q] * ipow(std::sin(mid + 0.5 * width * rule.nodes[q]), n);
    }
    sum += 0.5 * width * part;
  }
  return sum;
}

/// \int_0^x sin^n(r) dr.
inline double sin_power_integral(int n, double x) { return sin_power_segment(n, 0.0, x); }

/// \int_0^{x_i} sin^n(r) dr for many upper limits at once.
///
/// Limits are visited in increasing order and each value is the previous one
/// plus the integral over the gap, so clustered limits cost little.
inline std::vector<double> sin_power_integrals(int n, std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> out(xs.size());
  double prev_x = 0.0;
  double acc = 0.0;
  for (std::size_t idx : order) {
    acc += sin_power_segment(n, prev_x, xs[idx]);
    prev_x = xs[idx];
    out[idx] = acc;
  }
  return out;
}

} // namespace quermass
