#pragma once

// Inequality checks on concrete convex hypersurfaces, and the shape families
// they run over.

#include "ballgeom.hpp"
#include "errors.hpp"
#include "hypersurface.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace quermass {

enum class Verdict { pass, fail, experimental };

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
  case Verdict::pass:
    return "pass";
  case Verdict::fail:
    return "fail";
  case Verdict::experimental:
    return "experimental";
  }
  return "unknown";
}

struct InequalityRow {
  std::string check;
  int k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double rel_margin = 0.0;
  Verdict verdict = Verdict::pass;
  bool equality = false;
  /// Same inequality with eta_k in place of sqrt(eta_k), where that reading exists.
  double rhs_literal = std::numeric_limits<double>::quiet_NaN();
  double margin_literal = std::numeric_limits<double>::quiet_NaN();
};

struct InequalityReport {
  std::string shape_id;
  int n = 0;
  int N = 0;
  std::vector<InequalityRow> rows;

  bool all_pass() const noexcept {
    return std::none_of(rows.begin(), rows.end(), [](const InequalityRow& r) { return r.verdict == Verdict::fail; });
  }
};

namespace detail {

inline InequalityRow make_row(std::string check, int k, double lhs, double rhs, bool gated = true) {
  InequalityRow r;
  r.check = std::move(check);
  r.k = k;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.rel_margin = scale > 0.0 ? r.margin / scale : 0.0;
  if (!std::isfinite(r.margin)) {
    throw computation_error("inequality check '" + r.check + "' produced a non-finite margin");
  }
  r.equality = std::abs(r.margin) <= 1e-6 * scale;
  if (!gated) {
    r.verdict = Verdict::experimental;
  } else {
    r.verdict = r.margin >= -1e-8 * scale ? Verdict::pass : Verdict::fail;
  }
  return r;
}

inline void require_k(int n, int k, int lo, int hi, const char* who) {
  if (k < lo || k > hi) {
    throw domain_error(std::string(who) + ": k=" + std::to_string(k) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "] for n=" + std::to_string(n));
  }
}

/// The A_{k-2} (or n Vol for k = 1) term linking int sigma_k to A_k.
inline double lower_order_term(const SurfaceMeasures& m, int k) {
  return k == 1 ? m.n * m.volume : static_cast<double>(m.n - k + 1) / (k - 1) * m.quermass[k - 2];
}

} // namespace detail

/// int sigma_k >= sqrt(eta_k(A_{k-1})), 0 <= k <= n-1.
inline InequalityRow check_ineq1(const SurfaceMeasures& m, int k) {
  detail::require_k(m.n, k, 0, m.n - 1, "check_ineq1");
  const double lhs = m.sigma_int[static_cast<std::size_t>(k)];
  const double rhs = sqrt_eta(m.n, k, m.quermass[k - 1]);
  return detail::make_row("ineq1", k, lhs, rhs);
}

/// A_k >= sqrt(eta_k(A_{k-1})) + (n-k+1)/(k-1) A_{k-2}  (k = 1: + n Vol).
/// The verdict uses sqrt(eta_k); the literal eta_k reading is reported alongside.
inline InequalityRow check_three(const SurfaceMeasures& m, int k) {
  detail::require_k(m.n, k, 1, m.n - 1, "check_three");
  const double a = m.quermass[k - 1];
  const double extra = detail::lower_order_term(m, k);
  const double root = sqrt_eta(m.n, k, a);
  auto row = detail::make_row("three", k, m.quermass[k], root + extra);
  row.rhs_literal = root * root + extra;
  row.margin_literal = row.lhs - row.rhs_literal;
  return row;
}

/// A_k >= sqrt(eta_k(A_{k-1})), the non-sharp two-quermassintegral relation.
inline InequalityRow check_two_adjacent(const SurfaceMeasures& m, int k) {
  detail::require_k(m.n, k, 1, m.n - 1, "check_two_adjacent");
  const double root = sqrt_eta(m.n, k, m.quermass[k - 1]);
  auto row = detail::make_row("two_adjacent", k, m.quermass[k], root);
  row.rhs_literal = root * root;
  row.margin_literal = row.lhs - row.rhs_literal;
  return row;
}

/// A_{k-1} >= xi_{k-1,k-3}(A_{k-3}), 2 <= k <= n-1 (k = 2 compares A_1 with Vol).
inline InequalityRow check_chen_sun(const SurfaceMeasures& m, int k) {
  detail::require_k(m.n, k, 2, m.n - 1, "check_chen_sun");
  const double rhs = xi(m.n, k - 1, k - 3, m.quermass[k - 3]);
  return detail::make_row("chen_sun", k, m.quermass[k - 1], rhs);
}

/// A_k - xi_{k,k-1}(A_{k-1}); an open conjecture, so never a pass/fail gate.
inline InequalityRow probe_conjecture(const SurfaceMeasures& m, int k) {
  detail::require_k(m.n, k, 1, m.n - 1, "probe_conjecture");
  const double rhs = xi(m.n, k, k - 1, m.quermass[k - 1]);
  return detail::make_row("conjecture", k, m.quermass[k], rhs, false);
}

inline InequalityRow check_ineq1(const AxiSurface& s, int k) { return check_ineq1(measure(s), k); }
inline InequalityRow check_three(const AxiSurface& s, int k) { return check_three(measure(s), k); }
inline InequalityRow check_two_adjacent(const AxiSurface& s, int k) { return check_two_adjacent(measure(s), k); }
inline InequalityRow check_chen_sun(const AxiSurface& s, int k) { return check_chen_sun(measure(s), k); }
inline InequalityRow probe_conjecture(const AxiSurface& s, int k) { return probe_conjecture(measure(s), k); }

/// Measures with the integrals Richardson-extrapolated against the half
/// resolution surface (every other node), which removes the O(h^2) term.
/// Falls back to plain measures when N/2 is odd or below 4.
inline SurfaceMeasures refined_measures(const AxiSurface& surf) {
  auto fine = measure(surf);
  const int N = surf.intervals();
  if (N % 4 != 0 || N / 2 < 4) {
    return fine;
  }
  std::vector<double> half;
  half.reserve(static_cast<std::size_t>(N / 2 + 1));
  for (int i = 0; i <= N; i += 2) {
    half.push_back(surf.rho()[static_cast<std::size_t>(i)]);
  }
  const auto coarse = measure(AxiSurface(surf.n(), std::move(half)));
  auto extrapolate = [](double f, double c) { return (4.0 * f - c) / 3.0; };
  for (std::size_t j = 0; j < fine.sigma_int.size(); ++j) {
    fine.sigma_int[j] = extrapolate(fine.sigma_int[j], coarse.sigma_int[j]);
  }
  fine.volume = extrapolate(fine.volume, coarse.volume);
  fine.quermass = quermass_from_integrals(surf.n(), fine.volume, fine.sigma_int);
  return fine;
}

/// Every check at every admissible k, ordered by k and then by check.
/// Set `refine` to false to use the raw resolution-N integrals.
inline InequalityReport verify_surface(const AxiSurface& surf, std::string shape_id, bool refine = true) {
  const auto m = refine ? refined_measures(surf) : measure(surf);
  if (!m.convexity.strictly_convex) {
    throw precondition_error("verify_surface: surface is not strictly convex");
  }
  InequalityReport rep;
  rep.shape_id = std::move(shape_id);
  rep.n = surf.n();
  rep.N = surf.intervals();
  for (int k = 0; k <= surf.n() - 1; ++k) {
    rep.rows.push_back(check_ineq1(m, k));
    if (k >= 1) {
      rep.rows.push_back(check_three(m, k));
      rep.rows.push_back(check_two_adjacent(m, k));
      rep.rows.push_back(probe_conjecture(m, k));
    }
    if (k >= 2) {
      rep.rows.push_back(check_chen_sun(m, k));
    }
  }
  return rep;
}

/// `centered:rho0`, `offcenter:r,d` or `perturbed:rho0,eps,mode`.
struct ShapeSpec {
  enum class Kind { centered, offcenter, perturbed };
  Kind kind = Kind::centered;
  double a = 0.0;
  double b = 0.0;
  int mode = 0;

  static ShapeSpec parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw domain_error("shape: expected '<kind>:<params>', got '" + std::string(text) + "'");
    }
    const std::string_view kind = text.substr(0, colon);
    std::vector<double> p;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string token(rest.substr(0, comma));
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != token.size()) {
        throw domain_error("shape: bad number '" + token + "' in '" + std::string(text) + "'");
      }
      p.push_back(value);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    ShapeSpec s;
    if (kind == "centered" && p.size() == 1) {
      s.kind = Kind::centered;
      s.a = p[0];
    } else if (kind == "offcenter" && p.size() == 2) {
      s.kind = Kind::offcenter;
      s.a = p[0];
      s.b = p[1];
    } else if (kind == "perturbed" && p.size() == 3) {
      s.kind = Kind::perturbed;
      s.a = p[0];
      s.b = p[1];
      s.mode = static_cast<int>(p[2]);
      if (static_cast<double>(s.mode) != p[2]) {
        throw domain_error("shape: perturbation mode must be an integer");
      }
    } else {
      throw domain_error("shape: unknown kind or wrong parameter count in '" + std::string(text) + "'");
    }
    return s;
  }

  bool is_geodesic_sphere() const noexcept { return kind != Kind::perturbed || b == 0.0; }

  std::string id() const {
    char buf[96];
    switch (kind) {
    case Kind::centered:
      std::snprintf(buf, sizeof buf, "centered:%.10g", a);
      break;
    case Kind::offcenter:
      std::snprintf(buf, sizeof buf, "offcenter:%.10g,%.10g", a, b);
      break;
    case Kind::perturbed:
      std::snprintf(buf, sizeof buf, "perturbed:%.10g,%.10g,%d", a, b, mode);
      break;
    }
    return buf;
  }

  AxiSurface build(int n, int N) const {
    switch (kind) {
    case Kind::centered:
      return centered_sphere(n, N, a);
    case Kind::offcenter:
      return offcenter_sphere(n, N, a, b);
    case Kind::perturbed:
      return perturbed_sphere(n, N, a, b, mode);
    }
    throw domain_error("shape: unknown kind");
  }
};

struct FamilyMember {
  ShapeSpec spec;
  int n = 0;
  int N = 0;
  std::optional<AxiSurface> surface;
  /// Why the shape was dropped (construction failure or not strictly convex).
  std::string excluded;

  std::string id() const { return "n=" + std::to_string(n) + "/" + spec.id(); }
};

/// Instantiates every (shape, n) pair; members that fail construction or
/// strict convexity keep an exclusion note instead of a surface.
inline std::vector<FamilyMember> shape_family(const std::vector<ShapeSpec>& shapes, const std::vector<int>& dims,
                                              int N) {
  std::vector<FamilyMember> out;
  for (int n : dims) {
    for (const auto& spec : shapes) {
      FamilyMember m;
      m.spec = spec;
      m.n = n;
      m.N = N;
      try {
        auto surf = spec.build(n, N);
        const auto c = convexity_check(surf);
        if (c.strictly_convex) {
          m.surface = std::move(surf);
        } else {
          m.excluded = "not strictly convex (margin " + std::to_string(c.margin) + ")";
        }
      } catch (const std::exception& e) {
        m.excluded = e.what();
      }
      out.push_back(std::move(m));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const FamilyMember& x, const FamilyMember& y) { return x.id() < y.id(); });
  return out;
}

struct FamilyOutcome {
  std::string shape_id;
  std::optional<InequalityReport> report;
  std::string error;
};

/// Verifies every retained member, spreading members over `threads` workers
/// (0 = hardware concurrency). Output order follows the input order.
inline std::vector<FamilyOutcome> verify_family(const std::vector<FamilyMember>& members, unsigned threads = 0) {
  std::vector<FamilyOutcome> out(members.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < members.size(); i = next++) {
      out[i].shape_id = members[i].id();
      if (!members[i].surface) {
        out[i].error = "excluded: " + members[i].excluded;
        continue;
      }
      try {
        out[i].report = verify_surface(*members[i].surface, members[i].id());
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, members.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }
  return out;
}

} // namespace quermass
