#pragma once

#include "errors.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quermass {

/// Quermassintegrals A_{-1}, ..., A_n of a domain in S^{n+1}.
class QuermassVector {
public:
  QuermassVector() = default;
  explicit QuermassVector(std::vector<double> values) : values_(std::move(values)) {}

  int n() const noexcept { return static_cast<int>(values_.size()) - 2; }

  double operator[](int k) const {
    if (k < -1 || k > n()) {
      throw domain_error("QuermassVector: index " + std::to_string(k) + " outside [-1, n]");
    }
    return values_[static_cast<std::size_t>(k + 1)];
  }

  std::span<const double> list() const noexcept { return values_; }

private:
  std::vector<double> values_;
};

/// Quermassintegral recursion in the unit sphere (K = 1):
///   A_{-1} = Vol, A_0 = int sigma_0, A_1 = int sigma_1 + n Vol,
///   A_k = int sigma_k + (n-k+1)/(k-1) A_{k-2},  2 <= k <= n.
/// sigma_int holds int sigma_0 .. int sigma_n.
inline QuermassVector quermass_from_integrals(int n, double volume, std::span<const double> sigma_int) {
  if (static_cast<int>(sigma_int.size()) != n + 1) {
    throw domain_error("quermass_from_integrals: expected n+1 curvature integrals");
  }
  std::vector<double> a(static_cast<std::size_t>(n + 2));
  a[0] = volume;
  a[1] = sigma_int[0];
  if (n >= 1) {
    a[2] = sigma_int[1] + n * volume;
  }
  for (int k = 2; k <= n; ++k) {
    a[static_cast<std::size_t>(k + 1)] =
        sigma_int[static_cast<std::size_t>(k)] + static_cast<double>(n - k + 1) / (k - 1) * a[static_cast<std::size_t>(k - 1)];
  }
  return QuermassVector(std::move(a));
}

} // namespace quermass
