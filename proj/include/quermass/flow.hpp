#pragma once

// Inverse curvature flow X_t = (sigma_{k-1} / sigma_k) nu of axisymmetric
// strictly convex hypersurfaces in S^{n+1}, the monotone quantity
//   Q_k(t) = exp(-2k(n-k)/(n-k+1) t) ((int sigma_k)^2 - eta_k(A_{k-1})),
// and checks of the integrated evolution identities along a run.
//
// For a radial graph the normal speed f becomes d rho / dt = f v.

#include "ballgeom.hpp"
#include "errors.hpp"
#include "hypersurface.hpp"
#include "math.hpp"
#include "quermass_vector.hpp"
#include "symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace quermass {

enum class TimeScheme { euler, heun };

enum class StopReason { equator, t_max, dt_underflow, domain_exit, step_limit };

inline const char* to_string(StopReason r) noexcept {
  switch (r) {
  case StopReason::equator:
    return "equator";
  case StopReason::t_max:
    return "t_max";
  case StopReason::dt_underflow:
    return "dt_underflow";
  case StopReason::domain_exit:
    return "domain_exit";
  case StopReason::step_limit:
    return "step_limit";
  }
  return "unknown";
}

inline const char* to_string(TimeScheme s) noexcept { return s == TimeScheme::euler ? "euler" : "heun"; }

struct FlowConfig {
  int n = 3;
  /// Flow speed sigma_{k-1} / sigma_k, i.e. 1 / F with F = sigma_k / sigma_{k-1}.
  int k = 1;
  double dt_init = 1e-4;
  double dt_min = 1e-14;
  /// Fraction of the explicit parabolic stability limit h^2 / D used as a dt cap.
  double cfl = 0.4;
  double stop_rho_tol = 2e-3;
  double t_max = 10.0;
  int record_every = 10;
  TimeScheme scheme = TimeScheme::heun;
  /// When false the step is held at dt_init: no growth and no stability cap.
  bool adaptive = true;
  long max_steps = 20'000'000;

  void validate() const {
    if (n < 2) {
      throw domain_error("FlowConfig: need n >= 2");
    }
    if (k < 1 || k > n - 1) {
      throw domain_error("FlowConfig: need 1 <= k <= n-1");
    }
    if (!(dt_init > 0.0) || !(dt_min > 0.0) || !(stop_rho_tol > 0.0) || !(t_max > 0.0)) {
      throw domain_error("FlowConfig: time steps, tolerances and t_max must be positive");
    }
    if (!(cfl > 0.0 && cfl < 1.0)) {
      throw domain_error("FlowConfig: cfl must lie in (0, 1)");
    }
    if (record_every < 1 || max_steps < 1) {
      throw domain_error("FlowConfig: record_every and max_steps must be positive");
    }
  }
};

/// Decay rate 2k(n-k)/(n-k+1) in the exponential weight of Q_k.
inline double q_decay_rate(int n, int k) noexcept { return 2.0 * k * (n - k) / static_cast<double>(n - k + 1); }

inline double q_value(int n, int k, double t, double sigma_k_int, double a_km1) {
  return std::exp(-q_decay_rate(n, k) * t) * (sigma_k_int * sigma_k_int - eta(n, k, a_km1));
}

namespace detail {

struct NodeSigmas {
  double sk;
  double skm1;
  double skm2;
};

inline NodeSigmas node_sigmas(int n, int k, double km, double kp) noexcept {
  return {sigma_axisymmetric(n, k, km, kp), sigma_axisymmetric(n, k - 1, km, kp), sigma_axisymmetric(n, k - 2, km, kp)};
}

/// d rho / dt = (sigma_{k-1} / sigma_k) v at every node.
inline std::vector<double> graph_speed(const AxiSurface& surf, const GeometryData& g, int k) {
  std::vector<double> w(surf.nodes());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto s = node_sigmas(surf.n(), k, g.kappa_m[i], g.kappa_p[i]);
    if (!(s.sk > 0.0)) {
      throw precondition_error("flow: sigma_k <= 0 at node " + std::to_string(i));
    }
    w[i] = s.skm1 / s.sk * g.v[i];
  }
  return w;
}

inline AxiSurface advance(const AxiSurface& base, std::span<const double> w, double dt) {
  std::vector<double> rho(base.rho().begin(), base.rho().end());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] += dt * w[i];
    if (!std::isfinite(rho[i]) || !(rho[i] > 0.0 && rho[i] < pi)) {
      throw step_rejected("flow: radius left (0, pi) or became non-finite at node " + std::to_string(i));
    }
  }
  return AxiSurface(base, std::move(rho));
}

inline GeometryData convex_geometry_or_reject(const AxiSurface& s) {
  GeometryData g;
  try {
    g = geometry(s);
  } catch (const domain_error& e) {
    throw step_rejected(e.what());
  }
  const auto c = convexity_check(g);
  if (!c.strictly_convex || !std::isfinite(c.margin)) {
    throw step_rejected("flow: strict convexity lost (margin " + std::to_string(c.margin) + ")");
  }
  return g;
}

inline void require_convex(const GeometryData& g, const char* who) {
  if (!convexity_check(g).strictly_convex) {
    throw precondition_error(std::string(who) + ": surface is not strictly convex");
  }
}

struct AdvancedState {
  AxiSurface surface;
  GeometryData geometry;
};

/// Advances a strictly convex surface with known geometry by one step of the
/// chosen scheme. Throws step_rejected when the result is non-finite or not
/// strictly convex; the returned geometry belongs to the new surface.
inline AdvancedState advance_state(const AxiSurface& surf, const GeometryData& g, int k, double dt,
                                   TimeScheme scheme) {
  const auto w1 = graph_speed(surf, g, k);
  if (scheme == TimeScheme::euler) {
    auto next = advance(surf, w1, dt);
    auto gn = convex_geometry_or_reject(next);
    return {std::move(next), std::move(gn)};
  }
  const auto predicted = advance(surf, w1, dt);
  const auto gp = convex_geometry_or_reject(predicted);
  const auto w2 = graph_speed(predicted, gp, k);
  std::vector<double> w(w1.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = 0.5 * (w1[i] + w2[i]);
  }
  auto next = advance(surf, w, dt);
  auto gn = convex_geometry_or_reject(next);
  return {std::move(next), std::move(gn)};
}

} // namespace detail

/// One explicit Euler step rho <- rho + dt f v. Throws step_rejected when the
/// result is non-finite or not strictly convex.
inline AxiSurface step(const AxiSurface& surf, int k, double dt) {
  const auto g = geometry(surf);
  detail::require_convex(g, "step");
  if (dt == 0.0) {
    detail::graph_speed(surf, g, k);
    return surf;
  }
  return detail::advance_state(surf, g, k, dt, TimeScheme::euler).surface;
}

/// One step of Heun's method (explicit trapezoidal predictor-corrector).
inline AxiSurface step_heun(const AxiSurface& surf, int k, double dt) {
  const auto g = geometry(surf);
  detail::require_convex(g, "step_heun");
  if (dt == 0.0) {
    detail::graph_speed(surf, g, k);
    return surf;
  }
  return detail::advance_state(surf, g, k, dt, TimeScheme::heun).surface;
}

/// cfl * h^2 / max_i D_i, where D_i bounds the coefficient of rho'' in the
/// linearised graph equation (meridian plus parallel directions, doubled for
/// the reflected pole stencil).
inline double stable_dt(const AxiSurface& surf, const GeometryData& g, int k, double cfl) {
  const int n = surf.n();
  double d_max = 0.0;
  for (std::size_t i = 0; i < surf.nodes(); ++i) {
    const auto s = detail::node_sigmas(n, k, g.kappa_m[i], g.kappa_p[i]);
    // sum_i dF/dkappa_i for F = sigma_k / sigma_{k-1}
    const double dsum = ((n - k + 1) * s.skm1 * s.skm1 - (n - k + 2) * s.sk * s.skm2) / (s.skm1 * s.skm1);
    const double f = s.sk / s.skm1;
    const double q = g.rho_prime[i] * g.rho_prime[i] + ipow(std::sin(surf.rho()[i]), 2);
    d_max = std::max(d_max, 2.0 * std::abs(dsum) / (f * f * q));
  }
  return cfl * surf.h() * surf.h() / d_max;
}

struct FlowRecord {
  double t = 0.0;
  long step = 0;
  double dt = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double kappa_min = 0.0;
  /// int sigma_0 .. int sigma_n
  std::vector<double> sigma_int;
  QuermassVector quermass;
  double q_value = 0.0;
  /// int f [(l+1) sigma_{l+1} - (n-l+1) sigma_{l-1}] for l = 0..n-1
  std::vector<double> rhs_sigma;
  /// (l+1) int f sigma_{l+1} for l = 0..n-1
  std::vector<double> rhs_quermass;
  double resid_sigma = std::numeric_limits<double>::quiet_NaN();
  double resid_A = std::numeric_limits<double>::quiet_NaN();
};

struct FlowTrace {
  FlowConfig config;
  std::vector<FlowRecord> records;
  StopReason stop = StopReason::t_max;
  bool failed = false;
  std::string message;
  long steps_accepted = 0;
  long steps_rejected = 0;
  AxiSurface final_surface{2, std::vector<double>(5, 1.0)};

  /// Q_k non-increasing between consecutive records up to
  /// rel_slack * |Q_k(0)| + round_slack * max(1, (int sigma_k(0))^2), the second
  /// term covering rounding in the difference of squares.
  bool q_monotone(double rel_slack = 1e-6, double round_slack = 1e-12) const {
    if (records.empty()) {
      return true;
    }
    const auto& first = records.front();
    const auto k = static_cast<std::size_t>(config.k);
    const double sk = k < first.sigma_int.size() ? first.sigma_int[k] : 0.0;
    const double slack = rel_slack * std::abs(first.q_value) + round_slack * std::max(1.0, sk * sk);
    for (std::size_t j = 1; j < records.size(); ++j) {
      if (records[j].q_value - records[j - 1].q_value > slack) {
        return false;
      }
    }
    return true;
  }
};

/// Record of the current state: integrals, quermassintegrals, Q_k and the
/// right-hand sides of the evolution identities with f = sigma_{k-1}/sigma_k.
inline FlowRecord make_record(const AxiSurface& surf, const GeometryData& g, int k, double t, long step_index,
                              double dt, const QuermassInverter& inverse_km1) {
  const int n = surf.n();
  FlowRecord r;
  r.t = t;
  r.step = step_index;
  r.dt = dt;
  r.rho_min = surf.rho_min();
  r.rho_max = surf.rho_max();
  r.kappa_min = convexity_check(g).margin;
  r.sigma_int = sigma_integrals(surf, g);
  r.quermass = quermass_from_integrals(n, enclosed_volume(surf), r.sigma_int);

  const double a = r.quermass[k - 1];
  const double b = ball_sigma_integral(n, k, inverse_km1(a));
  r.q_value = std::exp(-q_decay_rate(n, k) * t) * (r.sigma_int[static_cast<std::size_t>(k)] *
                                                       r.sigma_int[static_cast<std::size_t>(k)] -
                                                   b * b);

  std::vector<double> f(surf.nodes());
  std::vector<std::vector<double>> sig(static_cast<std::size_t>(n + 2), std::vector<double>(surf.nodes()));
  for (std::size_t i = 0; i < surf.nodes(); ++i) {
    for (int j = 0; j <= n; ++j) {
      sig[static_cast<std::size_t>(j)][i] = sigma_axisymmetric(n, j, g.kappa_m[i], g.kappa_p[i]);
    }
    f[i] = sig[static_cast<std::size_t>(k - 1)][i] / sig[static_cast<std::size_t>(k)][i];
  }
  auto sigma_at = [&](int j, std::size_t i) {
    return (j < 0 || j > n) ? 0.0 : sig[static_cast<std::size_t>(j)][i];
  };
  r.rhs_sigma.resize(static_cast<std::size_t>(n));
  r.rhs_quermass.resize(static_cast<std::size_t>(n));
  std::vector<double> tmp(surf.nodes());
  for (int l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < tmp.size(); ++i) {
      tmp[i] = f[i] * ((l + 1) * sigma_at(l + 1, i) - (n - l + 1) * sigma_at(l - 1, i));
    }
    r.rhs_sigma[static_cast<std::size_t>(l)] = integrate_weighted(surf, g, tmp);
    for (std::size_t i = 0; i < tmp.size(); ++i) {
      tmp[i] = (l + 1) * f[i] * sigma_at(l + 1, i);
    }
    r.rhs_quermass[static_cast<std::size_t>(l)] = integrate_weighted(surf, g, tmp);
  }
  return r;
}

struct IdentityReport {
  /// max over interior records and l of |FD - rhs| / max_j |rhs_l(t_j)|
  double max_rel_sigma = 0.0;
  double max_rel_A = 0.0;
  std::vector<double> resid_sigma;
  std::vector<double> resid_A;
};

/// Compares three-point time differences of int sigma_l and A_l across trace
/// records (non-uniform spacing allowed) against the recorded right-hand sides.
inline IdentityReport check_evolution_identities(const FlowTrace& trace) {
  const auto& rec = trace.records;
  if (rec.size() < 3) {
    throw insufficient_data("check_evolution_identities: need at least 3 records, have " + std::to_string(rec.size()));
  }
  const int n = trace.config.n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  IdentityReport rep;
  rep.resid_sigma.assign(rec.size(), nan);
  rep.resid_A.assign(rec.size(), nan);

  std::vector<double> scale_sigma(static_cast<std::size_t>(n), 0.0);
  std::vector<double> scale_a(static_cast<std::size_t>(n), 0.0);
  for (const auto& r : rec) {
    for (int l = 0; l < n; ++l) {
      scale_sigma[static_cast<std::size_t>(l)] =
          std::max(scale_sigma[static_cast<std::size_t>(l)], std::abs(r.rhs_sigma[static_cast<std::size_t>(l)]));
      scale_a[static_cast<std::size_t>(l)] =
          std::max(scale_a[static_cast<std::size_t>(l)], std::abs(r.rhs_quermass[static_cast<std::size_t>(l)]));
    }
  }

  for (std::size_t j = 1; j + 1 < rec.size(); ++j) {
    const double h1 = rec[j].t - rec[j - 1].t;
    const double h2 = rec[j + 1].t - rec[j].t;
    if (!(h1 > 0.0 && h2 > 0.0)) {
      continue;
    }
    const double cm = -h2 / (h1 * (h1 + h2));
    const double c0 = (h2 - h1) / (h1 * h2);
    const double cp = h1 / (h2 * (h1 + h2));
    auto ddt = [&](auto get) { return cm * get(rec[j - 1]) + c0 * get(rec[j]) + cp * get(rec[j + 1]); };

    double rs = 0.0;
    double ra = 0.0;
    for (int l = 0; l < n; ++l) {
      const auto li = static_cast<std::size_t>(l);
      const double ds = ddt([li](const FlowRecord& r) { return r.sigma_int[li]; });
      const double da = ddt([l](const FlowRecord& r) { return r.quermass[l]; });
      if (scale_sigma[li] > 0.0) {
        rs = std::max(rs, std::abs(ds - rec[j].rhs_sigma[li]) / scale_sigma[li]);
      }
      if (scale_a[li] > 0.0) {
        ra = std::max(ra, std::abs(da - rec[j].rhs_quermass[li]) / scale_a[li]);
      }
    }
    rep.resid_sigma[j] = rs;
    rep.resid_A[j] = ra;
    rep.max_rel_sigma = std::max(rep.max_rel_sigma, rs);
    rep.max_rel_A = std::max(rep.max_rel_A, ra);
  }
  return rep;
}

/// Runs the flow from `initial` until it reaches the equator, exceeds t_max,
/// or the time step underflows.
inline FlowTrace run(const FlowConfig& config, const AxiSurface& initial) {
  config.validate();
  if (initial.n() != config.n) {
    throw domain_error("run: surface dimension does not match the configuration");
  }
  const int k = config.k;
  FlowTrace trace;
  trace.config = config;

  auto g = geometry(initial);
  if (!convexity_check(g).strictly_convex) {
    throw precondition_error("run: initial surface is not strictly convex");
  }
  if (!(initial.rho_max() < half_pi)) {
    throw precondition_error("run: initial surface must lie in the open hemisphere (max rho < pi/2)");
  }

  const QuermassInverter inverse(config.n, k - 1);
  AxiSurface surf = initial;
  double t = 0.0;
  double dt = config.dt_init;
  long steps = 0;
  long since_growth = 0;
  bool last_recorded = false;

  auto record = [&](double dt_used) {
    try {
      trace.records.push_back(make_record(surf, g, k, t, steps, dt_used, inverse));
      last_recorded = true;
      return true;
    } catch (const domain_error& e) {
      trace.stop = StopReason::domain_exit;
      trace.failed = true;
      trace.message = e.what();
      return false;
    }
  };

  auto at_equator = [&] {
    double worst = 0.0;
    for (double r : surf.rho()) {
      worst = std::max(worst, std::abs(r - half_pi));
    }
    return worst < config.stop_rho_tol;
  };

  if (!record(0.0)) {
    trace.final_surface = surf;
    return trace;
  }

  const double t_end_fixed = config.t_max - 0.5 * config.dt_init;
  while (true) {
    if (at_equator()) {
      trace.stop = StopReason::equator;
      break;
    }
    if (config.adaptive ? t >= config.t_max : t >= t_end_fixed) {
      trace.stop = StopReason::t_max;
      break;
    }
    if (steps >= config.max_steps) {
      trace.stop = StopReason::step_limit;
      break;
    }

    double dt_try = dt;
    if (config.adaptive) {
      dt_try = std::min({dt, stable_dt(surf, g, k, config.cfl), config.t_max - t});
    }
    try {
      auto next = detail::advance_state(surf, g, k, dt_try, config.scheme);
      surf = std::move(next.surface);
      g = std::move(next.geometry);
      t += dt_try;
      ++steps;
      ++trace.steps_accepted;
      last_recorded = false;
      if (config.adaptive) {
        dt = dt_try;
        if (++since_growth >= 10) {
          dt *= 1.2;
          since_growth = 0;
        }
      }
      if (steps % config.record_every == 0 && !record(dt_try)) {
        break;
      }
    } catch (const step_rejected& e) {
      ++trace.steps_rejected;
      dt = 0.5 * dt_try;
      since_growth = 0;
      if (dt < config.dt_min) {
        trace.stop = StopReason::dt_underflow;
        trace.failed = true;
        trace.message = e.what();
        break;
      }
    }
  }
  if (!last_recorded && !trace.failed) {
    record(trace.records.empty() ? 0.0 : t - trace.records.back().t);
  }
  trace.final_surface = surf;

  if (trace.records.size() >= 3) {
    const auto rep = check_evolution_identities(trace);
    for (std::size_t j = 0; j < trace.records.size(); ++j) {
      trace.records[j].resid_sigma = rep.resid_sigma[j];
      trace.records[j].resid_A = rep.resid_A[j];
    }
  }
  return trace;
}

struct IdentityConvergence {
  IdentityReport coarse;
  IdentityReport fine;
  double ratio_sigma = 0.0;
  double ratio_A = 0.0;
};

/// Fixed-step runs at dt and dt/2 with the same record stride (so the
/// recording interval halves too); ratios are coarse / fine max residuals.
inline IdentityConvergence identity_convergence(FlowConfig config, const AxiSurface& initial) {
  config.adaptive = false;
  IdentityConvergence out;
  out.coarse = check_evolution_identities(run(config, initial));
  config.dt_init *= 0.5;
  out.fine = check_evolution_identities(run(config, initial));
  out.ratio_sigma = out.coarse.max_rel_sigma / out.fine.max_rel_sigma;
  out.ratio_A = out.coarse.max_rel_A / out.fine.max_rel_A;
  return out;
}

} // namespace quermass
