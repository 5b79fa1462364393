#pragma once

// Geodesic balls B_rho(o) in S^{n+1}: closed-form curvature integrals,
// quermassintegrals, their inverses, and the comparison functions xi and eta
// defined on the geodesic-sphere profile.

#include "errors.hpp"
#include "math.hpp"
#include "quadrature.hpp"
#include "quermass_vector.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quermass {

namespace detail {

inline void require_dimension(int n, const char* who) {
  if (n < 2) {
    throw domain_error(std::string(who) + ": need n >= 2");
  }
}

inline void require_radius(double rho, const char* who) {
  if (!(rho > 0.0 && rho <= half_pi)) {
    throw domain_error(std::string(who) + ": radius must lie in (0, pi/2], got " + std::to_string(rho));
  }
}

} // namespace detail

/// int_{dB_rho} sigma_k = C(n,k) omega_n sin^{n-k}(rho) cos^k(rho); all principal curvatures equal cot(rho).
inline double ball_sigma_integral(int n, int k, double rho) {
  if (k < 0 || k > n) {
    return 0.0;
  }
  return binomial(n, k) * sphere_area(n) * ipow(std::sin(rho), n - k) * ipow(std::cos(rho), k);
}

/// Vol(B_rho) = omega_n int_0^rho sin^n r dr.
inline double ball_volume(int n, double rho) { return sphere_area(n) * sin_power_integral(n, rho); }

/// A_k(B_rho) given Vol(B_rho); the volume only enters for odd k.
inline double ball_quermass_with_volume(int n, int k, double rho, double volume) {
  if (k < -1 || k > n) {
    throw domain_error("ball_quermass: need -1 <= k <= n");
  }
  // Walk the recursion down to its base: Vol for odd k, Area for even k.
  double acc = 0.0;
  double weight = 1.0;
  int j = k;
  while (j >= 2) {
    acc += weight * ball_sigma_integral(n, j, rho);
    weight *= static_cast<double>(n - j + 1) / (j - 1);
    j -= 2;
  }
  if (j == 1) {
    acc += weight * (ball_sigma_integral(n, 1, rho) + n * volume);
  } else if (j == 0) {
    acc += weight * ball_sigma_integral(n, 0, rho);
  } else {
    acc += weight * volume;
  }
  return acc;
}

inline bool quermass_needs_volume(int k) noexcept { return k % 2 != 0; }

/// A_k(B_rho) for -1 <= k <= n. Accepts any rho in [0, pi/2].
inline double ball_quermass(int n, int k, double rho) {
  return ball_quermass_with_volume(n, k, rho, quermass_needs_volume(k) ? ball_volume(n, rho) : 0.0);
}

/// s_k = A_k(B_{pi/2}), the quermassintegral of the hemisphere.
inline double hemisphere_quermass(int n, int k) { return ball_quermass(n, k, half_pi); }

struct BallProfile {
  int n = 0;
  double rho = 0.0;
  double area = 0.0;
  /// int sigma_0 .. int sigma_n over the boundary sphere.
  std::vector<double> sigma_int;
  double vol = 0.0;
  /// A_{-1} .. A_n.
  QuermassVector quermass;
};

inline BallProfile ball_profile(int n, double rho) {
  detail::require_dimension(n, "ball_profile");
  detail::require_radius(rho, "ball_profile");
  BallProfile p;
  p.n = n;
  p.rho = rho;
  p.sigma_int.resize(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) {
    p.sigma_int[static_cast<std::size_t>(k)] = ball_sigma_integral(n, k, rho);
  }
  p.area = p.sigma_int[0];
  p.vol = ball_volume(n, rho);
  p.quermass = quermass_from_integrals(n, p.vol, p.sigma_int);
  return p;
}

/// Sampled strictly increasing function on an interval, used to bracket inversions.
class MonotoneTable {
public:
  MonotoneTable(std::vector<double> x, std::vector<double> y, int order = 1)
      : x_(std::move(x)), y_(std::move(y)), order_(order) {
    if (x_.size() != y_.size() || x_.size() < 2) {
      throw domain_error("MonotoneTable: need at least two matching samples");
    }
    if (order_ != 1 && order_ != 3) {
      throw domain_error("MonotoneTable: interpolation order must be 1 or 3");
    }
    for (std::size_t i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1]) || !(y_[i] > y_[i - 1])) {
        throw computation_error("MonotoneTable: samples are not strictly increasing");
      }
    }
  }

  double x_min() const noexcept { return x_.front(); }
  double x_max() const noexcept { return x_.back(); }
  double y_min() const noexcept { return y_.front(); }
  double y_max() const noexcept { return y_.back(); }
  int order() const noexcept { return order_; }
  std::span<const double> xs() const noexcept { return x_; }
  std::span<const double> ys() const noexcept { return y_; }

  /// Sample interval [x_i, x_{i+1}] whose values enclose y.
  std::pair<double, double> bracket(double y) const {
    if (y < y_.front() || y > y_.back()) {
      throw domain_error("MonotoneTable: value outside tabulated range");
    }
    const std::size_t i = segment(y_, y);
    return {x_[i], x_[i + 1]};
  }

  double interpolate(double x) const {
    if (x < x_.front() || x > x_.back()) {
      throw domain_error("MonotoneTable: abscissa outside tabulated range");
    }
    const std::size_t i = segment(x_, x);
    if (order_ == 1 || x_.size() < 4) {
      const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
      return y_[i] + t * (y_[i + 1] - y_[i]);
    }
    // Four-point Lagrange stencil, shifted inward at the ends.
    std::size_t lo = i == 0 ? 0 : i - 1;
    if (lo + 3 >= x_.size()) {
      lo = x_.size() - 4;
    }
    double sum = 0.0;
    for (std::size_t a = lo; a < lo + 4; ++a) {
      double w = 1.0;
      for (std::size_t b = lo; b < lo + 4; ++b) {
        if (a != b) {
          w *= (x - x_[b]) / (x_[a] - x_[b]);
        }
      }
      sum += w * y_[a];
    }
    return sum;
  }

private:
  static std::size_t segment(const std::vector<double>& v, double value) {
    std::size_t lo = 0;
    std::size_t hi = v.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (v[mid] <= value ? lo : hi) = mid;
    }
    return lo;
  }

  std::vector<double> x_;
  std::vector<double> y_;
  int order_;
};

namespace detail {

template <class F>
double bisect_increasing(F&& f, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline void require_quermass_index(int n, int k, const char* who) {
  require_dimension(n, who);
  if (k < -1 || k > n - 1) {
    throw domain_error(std::string(who) + ": need -1 <= k <= n-1 (got k=" + std::to_string(k) + ")");
  }
}

/// Relative slack admitted above s_k, so that values equal to s_k up to rounding
/// map to the hemisphere.
inline constexpr double endpoint_slack = 4.0 * std::numeric_limits<double>::epsilon();

inline void require_quermass_value(int n, int k, double s, const char* who) {
  const double sk = hemisphere_quermass(n, k);
  if (!(s > 0.0 && s <= sk * (1.0 + endpoint_slack))) {
    throw domain_error(std::string(who) + ": value " + std::to_string(s) + " outside (0, s_" + std::to_string(k) +
                       "] with s_" + std::to_string(k) + " = " + std::to_string(sk));
  }
}

} // namespace detail

/// The radius rho in (0, pi/2] with A_k(B_rho) = s, by bisection on the strictly
/// increasing map rho -> A_k(B_rho). The closed endpoint s = s_k maps to pi/2.
inline double invert_quermass(int n, int k, double s) {
  detail::require_quermass_index(n, k, "invert_quermass");
  detail::require_quermass_value(n, k, s, "invert_quermass");
  if (s >= hemisphere_quermass(n, k)) {
    return half_pi;
  }
  return detail::bisect_increasing([&](double r) { return ball_quermass(n, k, r); }, s, 0.0, half_pi);
}

/// Inverse of rho -> A_k(B_rho) for a fixed (n, k), with a precomputed table
/// narrowing each bisection. Immutable after construction.
class QuermassInverter {
public:
  QuermassInverter(int n, int k, int samples = 257) : n_(n), k_(k), table_(build(n, k, samples)) {}

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  double upper() const noexcept { return table_.y_max(); }
  const MonotoneTable& table() const noexcept { return table_; }

  double operator()(double s) const {
    if (!(s > 0.0 && s <= table_.y_max() * (1.0 + detail::endpoint_slack))) {
      throw domain_error("QuermassInverter: value " + std::to_string(s) + " outside (0, s_" + std::to_string(k_) +
                         "] with s_" + std::to_string(k_) + " = " + std::to_string(table_.y_max()));
    }
    if (s >= table_.y_max()) {
      return half_pi;
    }
    const auto [lo, hi] = table_.bracket(s);
    if (!quermass_needs_volume(k_)) {
      return detail::bisect_increasing([&](double r) { return ball_quermass(n_, k_, r); }, s, lo, hi);
    }
    // Volume at the bracket's left end once; each probe integrates only the short remainder.
    const double omega = sphere_area(n_);
    const double base = sin_power_integral(n_, lo);
    return detail::bisect_increasing(
        [&](double r) {
          const double vol = omega * (base + sin_power_segment(n_, lo, r));
          return ball_quermass_with_volume(n_, k_, r, vol);
        },
        s, lo, hi);
  }

private:
  static MonotoneTable build(int n, int k, int samples) {
    detail::require_quermass_index(n, k, "QuermassInverter");
    if (samples < 2) {
      throw domain_error("QuermassInverter: need at least two samples");
    }
    std::vector<double> x(static_cast<std::size_t>(samples));
    std::vector<double> y(x.size());
    for (int i = 0; i < samples; ++i) {
      x[static_cast<std::size_t>(i)] = half_pi * i / (samples - 1);
      y[static_cast<std::size_t>(i)] = ball_quermass(n, k, x[static_cast<std::size_t>(i)]);
    }
    return MonotoneTable(std::move(x), std::move(y), 1);
  }

  int n_;
  int k_;
  MonotoneTable table_;
};

namespace detail {

inline void require_xi_indices(int n, int k, int l, const char* who) {
  require_dimension(n, who);
  if (!(-1 <= l && l < k && k <= n - 1)) {
    throw domain_error(std::string(who) + ": need -1 <= l < k <= n-1");
  }
}

} // namespace detail

/// xi_{k,l}(s): A_k(B_rho) at the radius where A_l(B_rho) = s.
inline double xi(int n, int k, int l, double s) {
  detail::require_xi_indices(n, k, l, "xi");
  return ball_quermass(n, k, invert_quermass(n, l, s));
}

/// xi_{k,l}^{-1}(s): A_l(B_rho) at the radius where A_k(B_rho) = s.
inline double xi_inv(int n, int k, int l, double s) {
  detail::require_xi_indices(n, k, l, "xi_inv");
  return ball_quermass(n, l, invert_quermass(n, k, s));
}

namespace detail {

inline void require_eta_index(int n, int k, const char* who) {
  require_dimension(n, who);
  if (k < 0 || k > n - 1) {
    throw domain_error(std::string(who) + ": need 0 <= k <= n-1");
  }
}

} // namespace detail

/// eta_k(s) = (int_{dB_rho} sigma_k)^2 at the radius where A_{k-1}(B_rho) = s.
inline double eta(int n, int k, double s) {
  detail::require_eta_index(n, k, "eta");
  const double b = ball_sigma_integral(n, k, invert_quermass(n, k - 1, s));
  return b * b;
}

/// sqrt(eta_k(s)): the curvature integral itself, as it enters the inequalities.
inline double sqrt_eta(int n, int k, double s) {
  detail::require_eta_index(n, k, "sqrt_eta");
  return ball_sigma_integral(n, k, invert_quermass(n, k - 1, s));
}

/// Explicit eta_1(s) = n^2 omega_n^{2/n} s^{2(n-1)/n} - n^2 s^2 on (0, omega_n],
/// with omega_n = |S^n| = (n+1) |B^{n+1}|.
inline double eta1_closed(int n, double s) {
  detail::require_dimension(n, "eta1_closed");
  const double s0 = sphere_area(n);
  if (!(s > 0.0 && s <= s0)) {
    throw domain_error("eta1_closed: value outside (0, s_0] with s_0 = " + std::to_string(s0));
  }
  const double nn = static_cast<double>(n);
  return nn * nn * std::pow(s0, 2.0 / nn) * std::pow(s, 2.0 * (nn - 1.0) / nn) - nn * nn * s * s;
}

inline double eta1_closed_derivative(int n, double s) {
  detail::require_dimension(n, "eta1_closed_derivative");
  const double s0 = sphere_area(n);
  if (!(s > 0.0 && s <= s0)) {
    throw domain_error("eta1_closed_derivative: value outside (0, s_0]");
  }
  const double nn = static_cast<double>(n);
  return nn * nn * std::pow(s0, 2.0 / nn) * (2.0 * (nn - 1.0) / nn) * std::pow(s, (nn - 2.0) / nn) -
         2.0 * nn * nn * s;
}

/// int_{dB_rho} sigma_{k-1} written through s = A_{k-1}(B_rho):
///   k = 1: s;  k = 2: s - n xi_{1,-1}^{-1}(s);  k >= 3: s - (n-k+2)/(k-2) xi_{k-1,k-3}^{-1}(s).
inline double eta_ode_b(int n, int k, double s) {
  detail::require_dimension(n, "eta_ode_b");
  if (k < 1 || k > n - 1) {
    throw domain_error("eta_ode_b: need 1 <= k <= n-1");
  }
  if (k == 1) {
    detail::require_quermass_value(n, 0, s, "eta_ode_b");
    return s;
  }
  if (k == 2) {
    return s - n * xi_inv(n, 1, -1, s);
  }
  return s - static_cast<double>(n - k + 2) / (k - 2) * xi_inv(n, k - 1, k - 3, s);
}

/// Right-hand side of the first-order ODE satisfied by eta_k:
///   eta_k'(s) = [2k(n-k)/(n-k+1) eta - 2(n-k+1) B(s)^2] / (k B(s)).
inline double eta_ode_rhs(int n, int k, double s, double eta_val) {
  if (!(eta_val > 0.0)) {
    throw precondition_error("eta_ode_rhs: eta value must be positive");
  }
  const double b = eta_ode_b(n, k, s);
  if (!(b > 0.0)) {
    throw computation_error("eta_ode_rhs: B(s) = " + std::to_string(b) + " is not positive at s = " +
                            std::to_string(s));
  }
  const double a = 2.0 * k * (n - k) / static_cast<double>(n - k + 1);
  return (a * eta_val - 2.0 * (n - k + 1) * b * b) / (k * b);
}

/// Classical RK4 integration of eta_ode_rhs from (s_start, eta_start) through
/// the points of s_grid, with `substeps` equal steps per grid interval.
/// Returns eta_start followed by the value at each grid point.
inline std::vector<double> eta_ode_integrate(int n, int k, double s_start, double eta_start,
                                             std::span<const double> s_grid, int substeps = 4) {
  detail::require_eta_index(n, k, "eta_ode_integrate");
  if (k < 1) {
    throw domain_error("eta_ode_integrate: the ODE is defined for k >= 1");
  }
  if (substeps < 1) {
    throw domain_error("eta_ode_integrate: substeps must be positive");
  }
  const double upper = hemisphere_quermass(n, k - 1);
  auto rhs = [&](double s, double y) {
    if (!(s > 0.0 && s < upper)) {
      throw computation_error("eta_ode_integrate: step left the domain (0, s_" + std::to_string(k - 1) +
                              ") at s = " + std::to_string(s));
    }
    return eta_ode_rhs(n, k, s, y);
  };

  std::vector<double> out;
  out.reserve(s_grid.size() + 1);
  out.push_back(eta_start);
  double s = s_start;
  double y = eta_start;
  for (double target : s_grid) {
    const double h = (target - s) / substeps;
    for (int i = 0; i < substeps; ++i) {
      const double k1 = rhs(s, y);
      const double k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1);
      const double k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2);
      const double k4 = rhs(s + h, y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      s += h;
    }
    s = target;
    out.push_back(y);
  }
  return out;
}

} // namespace quermass
