#pragma once

// Acceptance checks of the whole pipeline, one result per criterion.

#include "ballgeom.hpp"
#include "flow.hpp"
#include "hypersurface.hpp"
#include "oracles.hpp"
#include "symfunc.hpp"
#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace quermass::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

namespace detail {

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

inline double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

inline CriterionResult timed(int id, std::string name, double budget, const std::function<Outcome()>& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.budget_seconds = budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto o = body();
    r.pass = o.pass;
    r.detail = o.detail;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget > 0.0 && r.seconds > budget) {
    r.pass = false;
    r.detail += format("; runtime %.2f s over budget %.0f s", r.seconds, budget);
  }
  return r;
}

} // namespace detail

/// eta_1 closed form against the parametric definition.
inline CriterionResult eta1_closed_form() {
  return detail::timed(1, "eta_1 closed form vs parametric", 1.0, [] {
    double worst = 0.0;
    for (int n = 2; n <= 6; ++n) {
      const double s0 = sphere_area(n);
      for (int j = 0; j < 100; ++j) {
        const double s = s0 * (0.05 + 0.9 * j / 99.0);
        worst = std::max(worst, detail::rel(eta(n, 1, s), eta1_closed(n, s)));
      }
    }
    return detail::Outcome{worst < 1e-8, detail::format("max rel diff %.3e over n=2..6 (tol 1e-8)", worst)};
  });
}

/// eta_k ODE: right-hand side against finite differences of the parametric
/// eta_k, and RK4 integration against the parametric values.
inline CriterionResult eta_ode() {
  return detail::timed(2, "eta_k ODE vs parametric", 10.0, [] {
    double worst_fd = 0.0;
    double worst_alt = std::numeric_limits<double>::infinity();
    double worst_rk = 0.0;
    for (int n = 3; n <= 6; ++n) {
      for (int k = 2; k <= n - 1; ++k) {
        const double top = hemisphere_quermass(n, k - 1);
        const double h = 1e-4 * top;
        double alt_k = 0.0;
        for (int j = 0; j < 50; ++j) {
          const double s = top * (j + 1) / 51.0;
          const double e = eta(n, k, s);
          const double fd = oracle::central_difference4([&](double x) { return eta(n, k, x); }, s, h);
          const double rhs = eta_ode_rhs(n, k, s, e);
          worst_fd = std::max(worst_fd, std::abs(fd - rhs) / std::abs(fd));
          const double b = eta_ode_b(n, k, s);
          const double alt =
              (2.0 * k * (n - k) / static_cast<double>(n - k + 1) * e - 2.0 * (n - k + 2) * b * b) / (k * b);
          alt_k = std::max(alt_k, std::abs(fd - alt) / std::abs(fd));
        }
        worst_alt = std::min(worst_alt, alt_k);

        const double s_start = 0.25 * top;
        std::vector<double> grid;
        for (int j = 1; j <= 40; ++j) {
          grid.push_back(top * (0.25 + 0.5 * j / 40.0));
        }
        const auto ys = eta_ode_integrate(n, k, s_start, eta(n, k, s_start), grid, 8);
        for (std::size_t j = 0; j < grid.size(); ++j) {
          worst_rk = std::max(worst_rk, detail::rel(ys[j + 1], eta(n, k, grid[j])));
        }
      }
    }
    const bool ok = worst_fd < 1e-4 && worst_rk < 1e-4 && worst_alt > 1e-4;
    return detail::Outcome{ok, detail::format("rhs vs FD max rel %.3e, RK4 max rel %.3e (tol 1e-4); "
                                              "2(n-k+2) coefficient variant misses by >= %.3e",
                                              worst_fd, worst_rk, worst_alt)};
  });
}

/// Newton-Maclaurin gaps on random Gamma_k samples and on the diagonal, and
/// the sigma recurrence against subset enumeration.
inline CriterionResult newton_maclaurin(unsigned seed = 20261014u, int samples = 100000) {
  return detail::timed(3, "Newton-Maclaurin gaps and sigma oracle", 30.0, [=] {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> entry(-0.5, 2.0);
    std::uniform_real_distribution<double> log_scale(-2.0, 2.0);
    long violations = 0;
    long drawn = 0;
    double worst_violation = 0.0;
    for (int n = 2; n <= 8; ++n) {
      for (int k = 1; k <= n - 1; ++k) {
        int accepted = 0;
        std::vector<double> x(static_cast<std::size_t>(n));
        while (accepted < samples) {
          const double scale = std::exp(log_scale(rng));
          for (auto& v : x) {
            v = scale * entry(rng);
          }
          ++drawn;
          const CurvatureVector kv(x);
          const auto s = sigma_all(kv);
          if (!cone_class(s).contains(k)) {
            continue;
          }
          ++accepted;
          const auto g = newton_maclaurin_gap(kv, k);
          const double newton_scale =
              k * (n - k) * s[k] * s[k] + (n - k + 1) * (k + 1) * std::abs(s[k - 1] * s[k + 1]);
          const double mac_scale =
              c_nk(n, k) * s[k] * std::pow(s[k] / binomial(n, k), 1.0 / k) + std::abs(s[k + 1]);
          const double vn = -g.newton / newton_scale;
          const double vm = -g.maclaurin / mac_scale;
          if (vn > 1e-12 || vm > 1e-12) {
            ++violations;
          }
          worst_violation = std::max({worst_violation, vn, vm});
        }
      }
    }

    double worst_diag = 0.0;
    for (int n = 2; n <= 8; ++n) {
      for (int k = 1; k <= n - 1; ++k) {
        for (double c : {1e-3, 0.1, 0.37, 0.5, 0.9, 1.0}) {
          const auto g = newton_maclaurin_gap(CurvatureVector(std::vector<double>(static_cast<std::size_t>(n), c)), k);
          worst_diag = std::max({worst_diag, std::abs(g.newton), std::abs(g.maclaurin)});
        }
      }
    }

    double worst_sigma = 0.0;
    std::uniform_real_distribution<double> signed_entry(-2.0, 2.0);
    for (int n = 1; n <= 12; ++n) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(n));
        std::vector<double> ax(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          x[static_cast<std::size_t>(i)] = signed_entry(rng);
          ax[static_cast<std::size_t>(i)] = std::abs(x[static_cast<std::size_t>(i)]);
        }
        const auto e = elementary_symmetric(std::span<const double>(x));
        for (int k = 0; k <= n; ++k) {
          const long double ref = oracle::subset_sigma(x, k);
          const long double scale = oracle::subset_sigma(ax, k);
          worst_sigma = std::max(worst_sigma, static_cast<double>(std::abs(e[static_cast<std::size_t>(k)] - ref) / scale));
        }
      }
    }
    const bool ok = violations == 0 && worst_diag < 1e-12 && worst_sigma < 1e-12;
    return detail::Outcome{ok, detail::format("%ld violations in %d samples per (n,k) (drawn %ld, worst %.2e); "
                                              "diagonal max |gap| %.2e; sigma vs subsets max rel %.2e",
                                              violations, samples, drawn, worst_violation, worst_diag, worst_sigma)};
  });
}

/// Curvatures on centred and off-centre spheres, convergence order and
/// isometry invariance of the quermassintegrals.
inline CriterionResult curvature_convergence() {
  return detail::timed(4, "curvature oracle and convergence order", 0.0, [] {
    auto max_err = [](const AxiSurface& s, double r) {
      const auto g = geometry(s);
      double e = 0.0;
      for (std::size_t i = 0; i < g.kappa_m.size(); ++i) {
        e = std::max({e, std::abs(g.kappa_m[i] - oracle::sphere_curvature(r)),
                      std::abs(g.kappa_p[i] - oracle::sphere_curvature(r))});
      }
      return e;
    };
    bool ok = true;
    double centered = 0.0;
    double ratio_lo = std::numeric_limits<double>::infinity();
    double ratio_hi = 0.0;
    double worst_q = 0.0;
    for (int n = 2; n <= 4; ++n) {
      centered = std::max(centered, max_err(centered_sphere(n, 200, 0.8), 0.8));
      const double e1 = max_err(offcenter_sphere(n, 200, 0.6, 0.3), 0.6);
      const double e2 = max_err(offcenter_sphere(n, 400, 0.6, 0.3), 0.6);
      ratio_lo = std::min(ratio_lo, e1 / e2);
      ratio_hi = std::max(ratio_hi, e1 / e2);
      const auto m = measure(offcenter_sphere(n, 800, 0.6, 0.3));
      const auto ref = oracle::ball_quermass(n, 0.6L);
      for (int k = -1; k <= n; ++k) {
        worst_q = std::max(worst_q, detail::rel(m.quermass[k], static_cast<double>(ref[static_cast<std::size_t>(k + 1)])));
      }
    }
    ok = centered < 1e-3 && ratio_lo >= 3.5 && ratio_hi <= 4.5 && worst_q < 1e-5;
    return detail::Outcome{ok, detail::format("centred kappa err %.2e at N=200 (tol 1e-3); off-centre error "
                                              "ratio N=200/400 in [%.3f, %.3f] (want [3.5, 4.5]); off-centre "
                                              "quermass max rel %.2e at N=800 (tol 1e-5)",
                                              centered, ratio_lo, ratio_hi, worst_q)};
  });
}

/// The shape corpus shared by the inequality criteria.
inline const std::vector<FamilyOutcome>& corpus_reports() {
  static const std::vector<FamilyOutcome> reports = [] {
    std::vector<ShapeSpec> shapes;
    for (const char* s : {"centered:0.4", "centered:0.8", "centered:1.2", "offcenter:0.6,0.3", "offcenter:0.4,0.2",
                          "offcenter:0.9,0.5", "perturbed:0.5,0.02,2", "perturbed:0.5,0.05,2",
                          "perturbed:0.9,0.02,2", "perturbed:0.9,0.05,2", "perturbed:1.2,0.02,2",
                          "perturbed:1.2,0.05,2"}) {
      shapes.push_back(ShapeSpec::parse(s));
    }
    return verify_family(shape_family(shapes, {2, 3, 4}, 800));
  }();
  return reports;
}

namespace detail {

struct CorpusTally {
  int rows = 0;
  int failed = 0;
  int sphere_not_tight = 0;
  int nonsphere_tight = 0;
  int strong_not_positive = 0;
  int excluded = 0;
  double worst_sphere = 0.0;
  double weakest_strong = std::numeric_limits<double>::infinity();
};

inline CorpusTally tally(const std::function<bool(const InequalityRow&)>& select, bool equality_rules) {
  CorpusTally t;
  const auto& reports = corpus_reports();
  for (const auto& o : reports) {
    if (!o.report) {
      ++t.excluded;
      continue;
    }
    const auto spec = ShapeSpec::parse(o.shape_id.substr(o.shape_id.find('/') + 1));
    const bool sphere = spec.is_geodesic_sphere();
    const bool strong = spec.kind == ShapeSpec::Kind::perturbed && spec.b >= 0.05;
    for (const auto& r : o.report->rows) {
      if (!select(r)) {
        continue;
      }
      ++t.rows;
      if (r.verdict != Verdict::pass) {
        ++t.failed;
      }
      if (!equality_rules) {
        continue;
      }
      if (sphere) {
        t.worst_sphere = std::max(t.worst_sphere, std::abs(r.rel_margin));
        if (std::abs(r.rel_margin) >= 1e-5) {
          ++t.sphere_not_tight;
        }
      } else if (std::abs(r.rel_margin) < 1e-5) {
        ++t.nonsphere_tight;
      }
      if (strong) {
        t.weakest_strong = std::min(t.weakest_strong, r.rel_margin);
        if (!(r.rel_margin > 1e-4)) {
          ++t.strong_not_positive;
        }
      }
    }
  }
  return t;
}

} // namespace detail

/// Main inequality (integral of sigma_k against sqrt eta_k) over the corpus,
/// plus the three-quermassintegral and two-adjacent relations.
inline CriterionResult ineq_corpus() {
  return detail::timed(5, "inequality on shape corpus", 0.0, [] {
    const auto main = detail::tally([](const InequalityRow& r) { return r.check == "ineq1"; }, true);
    const auto three = detail::tally([](const InequalityRow& r) { return r.check == "three"; }, true);
    const auto two = detail::tally([](const InequalityRow& r) { return r.check == "two_adjacent"; }, false);
    const bool ok = main.excluded == 0 && main.failed == 0 && main.sphere_not_tight == 0 &&
                    main.nonsphere_tight == 0 && main.strong_not_positive == 0 && three.failed == 0 &&
                    two.failed == 0;
    return detail::Outcome{ok, detail::format("%d rows, %d below -1e-8 scale; spheres max |rel| %.2e; "
                                              "%d non-spheres tight; eps=0.05 min rel %.2e; three %d/%d fail, "
                                              "two_adjacent %d/%d fail; %d shapes excluded",
                                              main.rows, main.failed, main.worst_sphere, main.nonsphere_tight,
                                              main.weakest_strong, three.failed, three.rows, two.failed, two.rows,
                                              main.excluded)};
  });
}

namespace detail {

inline FlowConfig flow_config(int n, int k) {
  FlowConfig c;
  c.n = n;
  c.k = k;
  c.dt_init = 1e-5;
  c.t_max = 50.0;
  return c;
}

} // namespace detail

/// Flow runs: monotone Q_k, convergence to the equator and decay of the
/// curvature integral; Q_k stays zero on spheres.
inline CriterionResult flow_monotonicity(int N = 400) {
  return detail::timed(6, "flow monotonicity and convergence", 0.0, [=] {
    std::string text;
    bool ok = true;
    double slowest = 0.0;
    for (int k : {1, 2}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto trace = run(detail::flow_config(3, k), perturbed_sphere(3, N, 0.9, 0.05, 2));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      slowest = std::max(slowest, secs);
      const auto& first = trace.records.front();
      const auto& last = trace.records.back();
      const double a0 = last.quermass[0] / sphere_area(3);
      const double decay = first.sigma_int[static_cast<std::size_t>(k)] / last.sigma_int[static_cast<std::size_t>(k)];
      const bool mono = trace.q_monotone(1e-6, 1e-12);
      const bool run_ok = !trace.failed && trace.stop == StopReason::equator && mono && std::abs(a0 - 1.0) < 0.01 &&
                          decay >= 100.0 && secs < 120.0;
      ok = ok && run_ok;
      text += detail::format("k=%d: stop %s, Q monotone %s, A_0/omega %.6f, sigma decay %.1fx, %.1f s; ", k,
                             to_string(trace.stop), mono ? "yes" : "no", a0, decay, secs);
    }
    // eta_k(s) loses about (k+1) log10(1/delta) digits at distance delta from
    // the equator, so the sphere test is gated where that loss stays below 1e-9.
    auto sphere_q = [](double stop_tol) {
      double worst = 0.0;
      for (int k : {1, 2}) {
        auto c = detail::flow_config(3, k);
        c.stop_rho_tol = stop_tol;
        const auto trace = run(c, centered_sphere(3, 100, 0.8));
        if (trace.failed || trace.stop != StopReason::equator) {
          return std::numeric_limits<double>::infinity();
        }
        for (const auto& r : trace.records) {
          const double b = r.sigma_int[static_cast<std::size_t>(k)];
          worst = std::max(worst, std::abs(r.q_value) / (b * b));
        }
      }
      return worst;
    };
    const double gated = sphere_q(2e-2);
    const double full = sphere_q(2e-3);
    ok = ok && gated < 1e-9;
    text += detail::format("sphere runs max |Q|/(int sigma_k)^2 %.2e to |rho-pi/2|<0.02 (tol 1e-9), %.2e to "
                           "|rho-pi/2|<0.002",
                           gated, full);
    return detail::Outcome{ok, text};
  });
}

/// Evolution identities along sphere runs and their second-order convergence.
inline CriterionResult evolution_identities() {
  return detail::timed(7, "evolution identities", 0.0, [] {
    double worst = 0.0;
    double ratio_lo = std::numeric_limits<double>::infinity();
    double ratio_hi = 0.0;
    for (int n = 2; n <= 4; ++n) {
      for (int k = 1; k <= n - 1; ++k) {
        FlowConfig c;
        c.n = n;
        c.k = k;
        c.dt_init = 1e-4;
        c.t_max = 0.05;
        c.record_every = 10;
        c.adaptive = false;
        const auto conv = identity_convergence(c, centered_sphere(n, 32, 0.8));
        worst = std::max({worst, conv.coarse.max_rel_sigma, conv.coarse.max_rel_A});
        ratio_lo = std::min({ratio_lo, conv.ratio_sigma, conv.ratio_A});
        ratio_hi = std::max({ratio_hi, conv.ratio_sigma, conv.ratio_A});
      }
    }
    const bool ok = worst < 1e-3 && ratio_lo >= 3.0 && ratio_hi <= 5.0;
    return detail::Outcome{ok, detail::format("max rel residual %.2e at dt=1e-4 (tol 1e-3); ratio dt/(dt/2) in "
                                              "[%.3f, %.3f] (want [3, 5])",
                                              worst, ratio_lo, ratio_hi)};
  });
}

/// The k = 0 (isoperimetric) case over the same corpus.
inline CriterionResult isoperimetric_case() {
  return detail::timed(8, "isoperimetric case k=0", 0.0, [] {
    const auto t = detail::tally([](const InequalityRow& r) { return r.check == "ineq1" && r.k == 0; }, true);
    const bool ok = t.excluded == 0 && t.rows > 0 && t.failed == 0 && t.sphere_not_tight == 0 &&
                    t.nonsphere_tight == 0 && t.strong_not_positive == 0;
    return detail::Outcome{ok, detail::format("%d shapes, %d below -1e-8 scale; spheres max |rel| %.2e; %d "
                                              "non-spheres tight; eps=0.05 min rel %.2e",
                                              t.rows, t.failed, t.worst_sphere, t.nonsphere_tight, t.weakest_strong)};
  });
}

inline std::vector<CriterionResult> run_all() {
  return {eta1_closed_form(), eta_ode(),       newton_maclaurin(),   curvature_convergence(),
          ineq_corpus(),      flow_monotonicity(), evolution_identities(), isoperimetric_case()};
}

inline std::string format_line(const CriterionResult& r) {
  return detail::format("[%s] %d %s: %s (%.2f s)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
                        r.seconds);
}

} // namespace quermass::acceptance
