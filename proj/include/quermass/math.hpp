#pragma once

#include <cmath>
#include <numbers>

namespace quermass {

inline constexpr double pi = std::numbers::pi;
inline constexpr double half_pi = std::numbers::pi / 2.0;

/// Binomial coefficient C(n, k) as a double; zero outside 0 <= k <= n.
inline double binomial(int n, int k) noexcept {
  if (k < 0 || n < 0 || k > n) {
    return 0.0;
  }
  if (k > n - k) {
    k = n - k;
  }
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
  }
  return c;
}

/// Area of the unit n-sphere S^n in R^{n+1}.
inline double sphere_area(int n) noexcept {
  const double m = 0.5 * (n + 1);
  return 2.0 * std::pow(pi, m) / std::tgamma(m);
}

/// Integer power by repeated squaring.
inline double ipow(double x, int p) noexcept {
  double r = 1.0;
  while (p > 0) {
    if (p & 1) {
      r *= x;
    }
    x *= x;
    p >>= 1;
  }
  return r;
}

} // namespace quermass
