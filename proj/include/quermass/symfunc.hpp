#pragma once

// Elementary symmetric functions of principal curvatures, the Garding cones
// Gamma_k and the Newton-Maclaurin inequalities.

#include "errors.hpp"
#include "math.hpp"

#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quermass {

/// Elementary symmetric polynomials e_0..e_n of the entries, by one-pass
/// product expansion: each entry x updates e_j <- e_j + x * e_{j-1}, j downward.
template <std::floating_point T>
std::vector<T> elementary_symmetric(std::span<const T> x) {
  std::vector<T> e(x.size() + 1, T{0});
  e[0] = T{1};
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j >= 1; --j) {
      e[j] += x[i] * e[j - 1];
    }
  }
  return e;
}

/// The n principal curvatures at a point.
class CurvatureVector {
public:
  explicit CurvatureVector(std::vector<double> kappa) : kappa_(std::move(kappa)) {
    if (kappa_.empty()) {
      throw domain_error("CurvatureVector: need at least one principal curvature");
    }
    for (double k : kappa_) {
      if (!std::isfinite(k)) {
        throw domain_error("CurvatureVector: non-finite principal curvature");
      }
    }
  }

  int n() const noexcept { return static_cast<int>(kappa_.size()); }
  std::span<const double> values() const noexcept { return kappa_; }

private:
  std::vector<double> kappa_;
};

/// sigma_{-1}, sigma_0, ..., sigma_n of a curvature vector.
///
/// Indexing is by the sigma order, so `at(-1) == 0` and `at(0) == 1`; orders
/// above n are zero, which keeps recurrences free of special cases.
class SymmetricSums {
public:
  explicit SymmetricSums(std::vector<double> values) : values_(std::move(values)) {}

  int n() const noexcept { return static_cast<int>(values_.size()) - 2; }

  double at(int k) const noexcept {
    if (k < -1 || k > n()) {
      return 0.0;
    }
    return values_[static_cast<std::size_t>(k + 1)];
  }
  double operator[](int k) const noexcept { return at(k); }

  /// The raw list (sigma_{-1}, sigma_0, ..., sigma_n), n + 2 entries.
  std::span<const double> list() const noexcept { return values_; }

private:
  std::vector<double> values_;
};

inline SymmetricSums sigma_all(const CurvatureVector& kv) {
  const auto e = elementary_symmetric(kv.values());
  std::vector<double> out;
  out.reserve(e.size() + 1);
  out.push_back(0.0);
  out.insert(out.end(), e.begin(), e.end());
  return SymmetricSums(std::move(out));
}

/// c_{n,k} = sigma_{k+1}(I) / sigma_k(I) = (n - k) / (k + 1).
inline double c_nk(int n, int k) {
  if (k < 0 || k >= n) {
    throw domain_error("c_nk: need 0 <= k < n (got n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  }
  return static_cast<double>(n - k) / static_cast<double>(k + 1);
}

struct ConeClass {
  /// Largest k with sigma_1, ..., sigma_k all > 0; zero when sigma_1 <= 0.
  int k_max = 0;

  bool contains(int k) const noexcept { return k <= k_max; }
};

inline ConeClass cone_class(const SymmetricSums& s) {
  ConeClass c;
  while (c.k_max < s.n() && s[c.k_max + 1] > 0.0) {
    ++c.k_max;
  }
  return c;
}

inline ConeClass cone_class(const CurvatureVector& kv) { return cone_class(sigma_all(kv)); }

struct NewtonMaclaurinGap {
  /// k(n-k) sigma_k^2 - (n-k+1)(k+1) sigma_{k-1} sigma_{k+1}
  double newton = 0.0;
  /// c_{n,k} sigma_k (sigma_k / C(n,k))^{1/k} - sigma_{k+1}
  double maclaurin = 0.0;
};

/// Both Newton-Maclaurin gaps of kappa at order k. Nonnegative on Gamma_k and
/// zero exactly on multiples of the identity.
///
/// The Maclaurin gap uses the binomially normalised power
/// (sigma_k / C(n,k))^{1/k}; without it the bound is not attained on c*I.
/// Evaluated in extended precision so that diagonal inputs cancel to roundoff.
inline NewtonMaclaurinGap newton_maclaurin_gap(const CurvatureVector& kv, int k) {
  const int n = kv.n();
  if (k < 1 || k > n - 1) {
    throw domain_error("newton_maclaurin_gap: need 1 <= k <= n-1");
  }
  std::vector<long double> x(kv.values().begin(), kv.values().end());
  const auto e = elementary_symmetric(std::span<const long double>(x));
  const long double sk = e[static_cast<std::size_t>(k)];
  const long double skm1 = e[static_cast<std::size_t>(k - 1)];
  const long double skp1 = e[static_cast<std::size_t>(k + 1)];

  ConeClass cone;
  while (cone.k_max < n && e[static_cast<std::size_t>(cone.k_max + 1)] > 0.0L) {
    ++cone.k_max;
  }
  if (!cone.contains(k)) {
    throw precondition_error("newton_maclaurin_gap: curvature vector is not in Gamma_" + std::to_string(k));
  }

  const long double kn = static_cast<long double>(k);
  const long double nk = static_cast<long double>(n - k);
  NewtonMaclaurinGap gap;
  gap.newton = static_cast<double>(kn * nk * sk * sk - (nk + 1.0L) * (kn + 1.0L) * skm1 * skp1);
  const long double c = nk / (kn + 1.0L);
  const long double normalised = sk / static_cast<long double>(binomial(n, k));
  gap.maclaurin = static_cast<double>(c * sk * std::pow(normalised, 1.0L / kn) - skp1);
  return gap;
}

} // namespace quermass
