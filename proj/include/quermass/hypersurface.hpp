#pragma once

// Axisymmetric hypersurfaces of S^{n+1} written as radial graphs rho(theta)
// over S^n about a fixed origin, with theta the polar angle on S^n.
//
// Induced metric:   g = (rho'^2 + sin^2 rho) dtheta^2 + sin^2 rho sin^2 theta dOmega_{n-1}
// Principal curvatures (outward normal, positive on small centred spheres):
//   kappa_m = (-rho'' + 2 cot(rho) rho'^2 + sin rho cos rho) / (v (rho'^2 + sin^2 rho))
//   kappa_p = (sin rho cos rho - rho' cot theta) / (v sin^2 rho),  multiplicity n-1
// with v = sqrt(1 + rho'^2 / sin^2 rho). At the poles rho' cot theta -> rho''.

#include "errors.hpp"
#include "math.hpp"
#include "quadrature.hpp"
#include "quermass_vector.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quermass {

/// Trigonometric data of the uniform polar grid theta_i = pi i / N, shared by
/// every surface on that grid. Pole entries are exact zeros.
struct PolarGrid {
  int n = 0;
  int intervals = 0;
  std::vector<double> sin_theta;
  std::vector<double> cot_theta;
  /// omega_{n-1} sin^{n-1}(theta_i)
  std::vector<double> parallel_area;
  /// Product-Simpson weights: int_0^pi f(theta) omega_{n-1} sin^{n-1}(theta) dtheta
  /// ~ sum_i weights[i] f(theta_i), with f interpolated quadratically per panel.
  std::vector<double> weights;

  PolarGrid(int dim, int N) : n(dim), intervals(N) {
    const auto m = static_cast<std::size_t>(N + 1);
    sin_theta.resize(m);
    cot_theta.resize(m);
    parallel_area.resize(m);
    const double omega = sphere_area(n - 1);
    for (std::size_t i = 0; i < m; ++i) {
      const bool pole = (i == 0 || i + 1 == m);
      const double t = pi * static_cast<double>(i) / N;
      sin_theta[i] = pole ? 0.0 : std::sin(t);
      cot_theta[i] = pole ? 0.0 : std::cos(t) / std::sin(t);
      parallel_area[i] = omega * ipow(sin_theta[i], n - 1);
    }
    weights.assign(m, 0.0);
    if (N < 2 || N % 2 != 0) {
      return;
    }
    const auto rule = gauss_legendre(24 + n);
    const double h = pi / N;
    for (int j = 0; j + 2 <= N; j += 2) {
      const double mid = h * (j + 1);
      double m0 = 0.0;
      double m1 = 0.0;
      double m2 = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = rule.nodes[q];
        const double w = rule.weights[q] * h * omega * ipow(std::sin(mid + h * x), n - 1);
        m0 += w;
        m1 += w * x;
        m2 += w * x * x;
      }
      const auto left = static_cast<std::size_t>(j);
      weights[left] += 0.5 * (m2 - m1);
      weights[left + 1] += m0 - m2;
      weights[left + 2] += 0.5 * (m2 + m1);
    }
  }
};

/// Radii rho_0..rho_N on the uniform polar grid theta_i = pi i / N.
class AxiSurface {
public:
  AxiSurface(int n, std::vector<double> rho) : n_(n), rho_(std::move(rho)) {
    if (n_ < 2) {
      throw domain_error("AxiSurface: need n >= 2");
    }
    const std::size_t intervals = rho_.empty() ? 0 : rho_.size() - 1;
    if (intervals < 4 || intervals % 2 != 0) {
      throw domain_error("AxiSurface: grid needs an even number N >= 4 of intervals");
    }
    validate_radii();
    grid_ = std::make_shared<const PolarGrid>(n_, static_cast<int>(intervals));
  }

  /// Same grid as `like`, new radii.
  AxiSurface(const AxiSurface& like, std::vector<double> rho) : n_(like.n_), rho_(std::move(rho)), grid_(like.grid_) {
    if (rho_.size() != like.rho_.size()) {
      throw domain_error("AxiSurface: radii do not match the grid size");
    }
    validate_radii();
  }

  int n() const noexcept { return n_; }
  /// Number of grid intervals N; there are N + 1 nodes including both poles.
  int intervals() const noexcept { return static_cast<int>(rho_.size()) - 1; }
  std::size_t nodes() const noexcept { return rho_.size(); }
  double h() const noexcept { return pi / intervals(); }
  double theta(std::size_t i) const noexcept {
    return i + 1 == rho_.size() ? pi : pi * static_cast<double>(i) / intervals();
  }
  const PolarGrid& grid() const noexcept { return *grid_; }
  std::span<const double> rho() const noexcept { return rho_; }
  double rho_min() const noexcept { return *std::min_element(rho_.begin(), rho_.end()); }
  double rho_max() const noexcept { return *std::max_element(rho_.begin(), rho_.end()); }

private:
  void validate_radii() const {
    for (double r : rho_) {
      if (!std::isfinite(r) || !(r > 0.0 && r < pi)) {
        throw domain_error("AxiSurface: radii must lie in (0, pi)");
      }
    }
  }

  int n_;
  std::vector<double> rho_;
  std::shared_ptr<const PolarGrid> grid_;
};

inline AxiSurface make_surface(int n, int N, const std::function<double(double)>& profile) {
  if (N < 4 || N % 2 != 0) {
    throw domain_error("make_surface: N must be even and >= 4");
  }
  std::vector<double> rho(static_cast<std::size_t>(N + 1));
  for (int i = 0; i <= N; ++i) {
    rho[static_cast<std::size_t>(i)] = profile(i == N ? pi : pi * i / N);
  }
  return AxiSurface(n, std::move(rho));
}

inline AxiSurface centered_sphere(int n, int N, double rho0) {
  return make_surface(n, N, [rho0](double) { return rho0; });
}

/// rho(theta) = rho0 + eps cos(m theta), m even so the profile is pole-regular.
inline AxiSurface perturbed_sphere(int n, int N, double rho0, double eps, int mode) {
  if (mode < 2 || mode % 2 != 0) {
    throw domain_error("perturbed_sphere: mode must be even and >= 2");
  }
  return make_surface(n, N, [=](double t) { return rho0 + eps * std::cos(mode * t); });
}

/// Geodesic sphere of radius r whose centre lies at distance d from the origin
/// along theta = 0. Solves cos r = cos d cos rho + sin d sin rho cos theta for rho > 0.
inline AxiSurface offcenter_sphere(int n, int N, double r, double d) {
  if (!(d >= 0.0 && d < r && r + d < half_pi)) {
    throw domain_error("offcenter_sphere: need 0 <= d < r and r + d < pi/2");
  }
  return make_surface(n, N, [=](double t) {
    const double cd = std::cos(d);
    const double sd = std::sin(d);
    const double ct = std::cos(t);
    const double big_r = std::sqrt(cd * cd + sd * sd * ct * ct);
    const double psi = std::atan2(sd * ct, cd);
    return psi + std::acos(std::clamp(std::cos(r) / big_r, -1.0, 1.0));
  });
}

struct GeometryData {
  std::vector<double> rho_prime;
  std::vector<double> rho_second;
  /// sqrt(1 + rho'^2 / sin^2 rho)
  std::vector<double> v;
  /// support function <sin(rho) d_rho, nu> = sin(rho) / v
  std::vector<double> u;
  std::vector<double> kappa_m;
  std::vector<double> kappa_p;
  /// quadrature weight of each node for surface integrals, parallels included
  std::vector<double> dA;
};

/// Fundamental-form data at every node; second-order central differences with
/// even reflection across the poles.
inline GeometryData geometry(const AxiSurface& surf) {
  const std::size_t m = surf.nodes();
  const int n = surf.n();
  const double h = surf.h();
  const auto rho = surf.rho();
  const auto& grid = surf.grid();

  GeometryData g;
  g.rho_prime.resize(m);
  g.rho_second.resize(m);
  g.v.resize(m);
  g.u.resize(m);
  g.kappa_m.resize(m);
  g.kappa_p.resize(m);
  g.dA.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    const bool pole = (i == 0 || i + 1 == m);
    const double left = i == 0 ? rho[1] : rho[i - 1];
    const double right = i + 1 == m ? rho[m - 2] : rho[i + 1];
    const double r = rho[i];
    const double d1 = pole ? 0.0 : (right - left) / (2.0 * h);
    const double d2 = (right - 2.0 * r + left) / (h * h);

    const double sr = std::sin(r);
    const double cr = std::cos(r);
    if (sr < 1e-8) {
      throw domain_error("geometry: surface touches a pole of S^{n+1} at node " + std::to_string(i));
    }
    const double q = d1 * d1 + sr * sr;
    const double v = std::sqrt(q) / sr;
    const double tangential = pole ? d2 : d1 * grid.cot_theta[i];

    g.rho_prime[i] = d1;
    g.rho_second[i] = d2;
    g.v[i] = v;
    g.u[i] = sr / v;
    g.kappa_m[i] = (-d2 + 2.0 * (cr / sr) * d1 * d1 + sr * cr) / (v * q);
    g.kappa_p[i] = (sr * cr - tangential) / (v * sr * sr);
    g.dA[i] = grid.weights[i] * std::sqrt(q) * ipow(sr, n - 1);
  }
  return g;
}

/// sigma_k of (kappa_m, kappa_p, ..., kappa_p) with kappa_p repeated n-1 times.
inline double sigma_axisymmetric(int n, int k, double kappa_m, double kappa_p) noexcept {
  if (k < 0 || k > n) {
    return 0.0;
  }
  const double tail = binomial(n - 1, k) * ipow(kappa_p, k);
  return k == 0 ? tail : tail + binomial(n - 1, k - 1) * ipow(kappa_p, k - 1) * kappa_m;
}

/// Surface integral of node values, sum of values[i] dA[i].
inline double integrate_weighted(const AxiSurface& surf, const GeometryData& g, std::span<const double> values) {
  if (values.size() != surf.nodes() || g.dA.size() != surf.nodes()) {
    throw domain_error("integrate_weighted: value count does not match the grid");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i] * g.dA[i];
  }
  return sum;
}

inline double integrate_sigma(const AxiSurface& surf, const GeometryData& g, int k) {
  if (k < 0 || k > surf.n()) {
    throw domain_error("integrate_sigma: need 0 <= k <= n");
  }
  std::vector<double> s(surf.nodes());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = sigma_axisymmetric(surf.n(), k, g.kappa_m[i], g.kappa_p[i]);
  }
  return integrate_weighted(surf, g, s);
}

inline double integrate_sigma(const AxiSurface& surf, int k) { return integrate_sigma(surf, geometry(surf), k); }

/// int sigma_0 .. int sigma_n.
inline std::vector<double> sigma_integrals(const AxiSurface& surf, const GeometryData& g) {
  std::vector<double> out(static_cast<std::size_t>(surf.n() + 1));
  for (int k = 0; k <= surf.n(); ++k) {
    out[static_cast<std::size_t>(k)] = integrate_sigma(surf, g, k);
  }
  return out;
}

/// omega_{n-1} int_0^pi sin^{n-1}(theta) int_0^{rho(theta)} sin^n(r) dr dtheta.
inline double enclosed_volume(const AxiSurface& surf) {
  const int n = surf.n();
  const auto inner = sin_power_integrals(n, surf.rho());
  const auto& weights = surf.grid().weights;
  double sum = 0.0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    sum += weights[i] * inner[i];
  }
  return sum;
}

inline QuermassVector quermass_all(const AxiSurface& surf, const GeometryData& g) {
  const auto s = sigma_integrals(surf, g);
  return quermass_from_integrals(surf.n(), enclosed_volume(surf), s);
}

inline double quermass(const AxiSurface& surf, int k) {
  if (k < -1 || k > surf.n()) {
    throw domain_error("quermass: need -1 <= k <= n");
  }
  if (k == -1) {
    return enclosed_volume(surf);
  }
  return quermass_all(surf, geometry(surf))[k];
}

struct ConvexityReport {
  bool strictly_convex = false;
  /// min over nodes of min(kappa_m, kappa_p)
  double margin = 0.0;
};

/// Curvatures at or below this count as zero; cot(pi/2) evaluates to about 6e-17.
inline constexpr double convexity_threshold = 1e-12;

inline ConvexityReport convexity_check(const GeometryData& g) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.kappa_m.size(); ++i) {
    margin = std::min({margin, g.kappa_m[i], g.kappa_p[i]});
  }
  return {margin > convexity_threshold, margin};
}

inline ConvexityReport convexity_check(const AxiSurface& surf) { return convexity_check(geometry(surf)); }

/// Everything the inequality checks need from one surface, computed once.
struct SurfaceMeasures {
  int n = 0;
  GeometryData geometry;
  std::vector<double> sigma_int;
  double volume = 0.0;
  QuermassVector quermass;
  ConvexityReport convexity;
};

inline SurfaceMeasures measure(const AxiSurface& surf) {
  SurfaceMeasures m;
  m.n = surf.n();
  m.geometry = geometry(surf);
  m.sigma_int = sigma_integrals(surf, m.geometry);
  m.volume = enclosed_volume(surf);
  m.quermass = quermass_from_integrals(surf.n(), m.volume, m.sigma_int);
  m.convexity = convexity_check(m.geometry);
  return m;
}

} // namespace quermass
