#pragma once

// Reference implementations that share no code with the production paths.
// Slow on purpose; used by the test suite and the acceptance checks.

#include "errors.hpp"
#include "math.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace quermass::oracle {

/// sigma_k by summing products over all k-subsets (bitmask enumeration).
inline long double subset_sigma(std::span<const double> x, int k) {
  const int n = static_cast<int>(x.size());
  if (n > 24) {
    throw domain_error("oracle::subset_sigma: n too large for enumeration");
  }
  if (k == 0) {
    return 1.0L;
  }
  if (k < 0 || k > n) {
    return 0.0L;
  }
  long double sum = 0.0L;
  const std::uint32_t limit = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (__builtin_popcount(mask) != k) {
      continue;
    }
    long double prod = 1.0L;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::uint32_t{1} << i)) {
        prod *= x[static_cast<std::size_t>(i)];
      }
    }
    sum += prod;
  }
  return sum;
}

/// int_0^x sin^n via the reduction I_n = -sin^{n-1} cos / n + (n-1)/n I_{n-2}.
inline long double sin_power_integral(int n, long double x) {
  if (n < 0) {
    throw domain_error("oracle::sin_power_integral: n must be nonnegative");
  }
  const long double s = std::sin(x);
  const long double c = std::cos(x);
  long double prev = x;            // I_0
  long double cur = 1.0L - c;      // I_1
  if (n == 0) {
    return prev;
  }
  for (int m = 2; m <= n; ++m) {
    const long double next = -std::pow(s, m - 1) * c / m + static_cast<long double>(m - 1) / m * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2) through the two-step recursion
/// |S^n| = 2 pi / (n-1) |S^{n-2}|.
inline long double sphere_area(int n) {
  long double a = n % 2 == 0 ? 2.0L : 2.0L * std::numbers::pi_v<long double>;
  for (int m = n % 2 == 0 ? 2 : 3; m <= n; m += 2) {
    a *= 2.0L * std::numbers::pi_v<long double> / (m - 1);
  }
  return a;
}

/// Quermassintegrals A_{-1}..A_n of the geodesic ball B_rho in S^{n+1},
/// recomputed from the closed forms with extended precision.
inline std::vector<long double> ball_quermass(int n, long double rho) {
  const long double w = sphere_area(n);
  const long double s = std::sin(rho);
  const long double c = std::cos(rho);
  std::vector<long double> a(static_cast<std::size_t>(n + 2));
  auto sigma_int = [&](int k) {
    long double binom = 1.0L;
    for (int j = 1; j <= k; ++j) {
      binom = binom * (n - k + j) / j;
    }
    return binom * w * std::pow(s, n - k) * std::pow(c, k);
  };
  const long double vol = w * sin_power_integral(n, rho);
  a[0] = vol;
  for (int k = 0; k <= n; ++k) {
    long double v = sigma_int(k);
    if (k == 1) {
      v += n * vol;
    } else if (k >= 2) {
      v += static_cast<long double>(n - k + 1) / (k - 1) * a[static_cast<std::size_t>(k - 1)];
    }
    a[static_cast<std::size_t>(k + 1)] = v;
  }
  return a;
}

/// Second-order centered difference.
template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Fourth-order five-point centered difference.
template <class F>
double central_difference4(F&& f, double x, double h) {
  return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

/// Curvatures of the geodesic sphere of radius r: all equal to cot r.
inline double sphere_curvature(double r) { return std::cos(r) / std::sin(r); }

/// Geodesic distance in S^{n+1} between the points at polar coordinates
/// (rho1, theta1) and (rho2, theta2) in a common meridian plane.
inline long double geodesic_distance(long double rho1, long double theta1, long double rho2, long double theta2) {
  const long double c =
      std::cos(rho1) * std::cos(rho2) + std::sin(rho1) * std::sin(rho2) * std::cos(theta1 - theta2);
  return std::acos(std::fmax(-1.0L, std::fmin(1.0L, c)));
}

} // namespace quermass::oracle
