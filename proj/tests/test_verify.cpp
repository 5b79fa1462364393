#include "quermass/ballgeom.hpp"
#include "quermass/errors.hpp"
#include "quermass/hypersurface.hpp"
#include "quermass/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

namespace q = quermass;
using q::pi;

TEST(CheckIneq1, SpheresAreEqualityCases) {
  for (int n = 2; n <= 4; ++n) {
    const auto m = q::measure(q::centered_sphere(n, 64, 0.8));
    for (int k = 0; k <= n - 1; ++k) {
      const auto r = q::check_ineq1(m, k);
      EXPECT_EQ(r.verdict, q::Verdict::pass);
      EXPECT_TRUE(r.equality);
      EXPECT_LT(std::abs(r.rel_margin), 1e-10);
    }
  }
}

TEST(CheckIneq1, OffCenterSphereIsTight) {
  const auto surf = q::offcenter_sphere(3, 800, 0.6, 0.3);
  const auto raw = q::measure(surf);
  const auto refined = q::refined_measures(surf);
  for (int k = 0; k <= 2; ++k) {
    EXPECT_LT(std::abs(q::check_ineq1(raw, k).rel_margin), 1e-5);
    const auto r = q::check_ineq1(refined, k);
    EXPECT_LT(std::abs(r.rel_margin), 1e-9);
    EXPECT_EQ(r.verdict, q::Verdict::pass);
  }
}

TEST(CheckIneq1, PerturbedSphereHasPositiveMargin) {
  const auto m = q::refined_measures(q::perturbed_sphere(3, 400, 0.9, 0.05, 2));
  for (int k = 0; k <= 2; ++k) {
    const auto r = q::check_ineq1(m, k);
    EXPECT_GT(r.rel_margin, 1e-4);
    EXPECT_FALSE(r.equality);
  }
}

TEST(CheckThree, ClosedFormInDimensionTwo) {
  const auto r = q::check_three(q::measure(q::centered_sphere(2, 64, pi / 4)), 1);
  EXPECT_NEAR(r.lhs, pi * pi + 2 * pi, 1e-9);
  EXPECT_NEAR(r.rhs, pi * pi + 2 * pi, 1e-9);
  EXPECT_NEAR(r.margin, 0.0, 1e-9);
  EXPECT_NEAR(r.rhs_literal, 16 * pi * pi + 2 * (pi * pi / 2 - pi), 1e-8);
}

TEST(CheckThree, MatchesIneq1MarginAndRecordsLiteral) {
  const auto m = q::refined_measures(q::perturbed_sphere(4, 400, 0.9, 0.05, 2));
  for (int k = 1; k <= 3; ++k) {
    const auto a = q::check_ineq1(m, k);
    const auto b = q::check_three(m, k);
    EXPECT_NEAR(a.margin, b.margin, 1e-10 * b.lhs);
    EXPECT_EQ(b.verdict, q::Verdict::pass);
    EXPECT_TRUE(std::isfinite(b.margin_literal));
    EXPECT_DOUBLE_EQ(b.margin_literal, b.lhs - b.rhs_literal);
  }
}

TEST(CheckTwoAdjacent, DominatesThree) {
  for (const auto& surf : {q::centered_sphere(3, 64, 0.8), q::perturbed_sphere(3, 400, 0.9, 0.05, 2)}) {
    const auto m = q::measure(surf);
    for (int k = 1; k <= 2; ++k) {
      const auto two = q::check_two_adjacent(m, k);
      const auto three = q::check_three(m, k);
      EXPECT_GT(two.margin, 0.0);
      EXPECT_GE(two.margin, three.margin);
      EXPECT_EQ(two.verdict, q::Verdict::pass);
    }
  }
}

TEST(CheckChenSun, SpheresAndPerturbed) {
  const auto c = q::measure(q::centered_sphere(4, 64, 0.8));
  const auto o = q::refined_measures(q::offcenter_sphere(4, 400, 0.6, 0.3));
  const auto p = q::refined_measures(q::perturbed_sphere(4, 400, 0.9, 0.05, 2));
  for (int k = 2; k <= 3; ++k) {
    EXPECT_LT(std::abs(q::check_chen_sun(c, k).rel_margin), 1e-10);
    EXPECT_LT(std::abs(q::check_chen_sun(o, k).rel_margin), 1e-8);
    EXPECT_GE(q::check_chen_sun(p, k).margin, 0.0);
  }
  EXPECT_THROW(q::check_chen_sun(c, 1), q::domain_error);
}

TEST(ProbeConjecture, NeverGates) {
  for (double eps : {0.01, 0.02, 0.04, 0.06, 0.08}) {
    const auto m = q::measure(q::perturbed_sphere(3, 200, 0.9, eps, 2));
    for (int k = 1; k <= 2; ++k) {
      EXPECT_EQ(q::probe_conjecture(m, k).verdict, q::Verdict::experimental);
    }
  }
}

TEST(Checks, IndexErrors) {
  const auto m = q::measure(q::centered_sphere(3, 32, 0.8));
  EXPECT_THROW(q::check_ineq1(m, 3), q::domain_error);
  EXPECT_THROW(q::check_ineq1(m, -1), q::domain_error);
  EXPECT_THROW(q::check_three(m, 0), q::domain_error);
  EXPECT_THROW(q::check_two_adjacent(m, 3), q::domain_error);
  EXPECT_THROW(q::probe_conjecture(m, 0), q::domain_error);
}

TEST(Verdict, ToleranceRule) {
  q::SurfaceMeasures m = q::measure(q::centered_sphere(2, 32, 0.8));
  const double s = m.sigma_int[1];
  m.sigma_int[1] = s * (1 - 5e-9);
  EXPECT_EQ(q::check_ineq1(m, 1).verdict, q::Verdict::pass);
  m.sigma_int[1] = s * (1 - 5e-8);
  EXPECT_EQ(q::check_ineq1(m, 1).verdict, q::Verdict::fail);
}

TEST(ShapeSpec, ParseAndBuild) {
  const auto a = q::ShapeSpec::parse("centered:0.8");
  EXPECT_EQ(a.kind, q::ShapeSpec::Kind::centered);
  EXPECT_EQ(a.id(), "centered:0.8");
  EXPECT_TRUE(a.is_geodesic_sphere());
  const auto b = q::ShapeSpec::parse("offcenter:0.6,0.3");
  EXPECT_EQ(b.build(3, 16).rho().front(), q::offcenter_sphere(3, 16, 0.6, 0.3).rho().front());
  const auto c = q::ShapeSpec::parse("perturbed:0.9,0.05,2");
  EXPECT_FALSE(c.is_geodesic_sphere());
  EXPECT_EQ(c.mode, 2);
  EXPECT_THROW(q::ShapeSpec::parse("cube:1"), q::domain_error);
  EXPECT_THROW(q::ShapeSpec::parse("centered"), q::domain_error);
  EXPECT_THROW(q::ShapeSpec::parse("centered:abc"), q::domain_error);
  EXPECT_THROW(q::ShapeSpec::parse("perturbed:0.9,0.05"), q::domain_error);
  EXPECT_THROW(q::ShapeSpec::parse("perturbed:0.9,0.05,2.5"), q::domain_error);
}

TEST(Family, ExcludesNonConvexAndIsDeterministic) {
  std::vector<q::ShapeSpec> shapes{q::ShapeSpec::parse("perturbed:0.9,0.05,2"), q::ShapeSpec::parse("centered:0.8"),
                                   q::ShapeSpec::parse("perturbed:1.2,0.5,2"), q::ShapeSpec::parse("offcenter:1,0.8")};
  const auto fam = q::shape_family(shapes, {3, 2}, 200);
  ASSERT_EQ(fam.size(), 8u);
  for (std::size_t i = 1; i < fam.size(); ++i) {
    EXPECT_LT(fam[i - 1].id(), fam[i].id());
  }
  int excluded = 0;
  for (const auto& m : fam) {
    if (!m.surface) {
      ++excluded;
      EXPECT_FALSE(m.excluded.empty());
    }
  }
  EXPECT_EQ(excluded, 4);
  const auto serial = q::verify_family(fam, 1);
  const auto parallel = q::verify_family(fam, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].shape_id, parallel[i].shape_id);
    ASSERT_EQ(serial[i].report.has_value(), parallel[i].report.has_value());
    if (serial[i].report) {
      EXPECT_TRUE(serial[i].report->all_pass());
      ASSERT_EQ(serial[i].report->rows.size(), parallel[i].report->rows.size());
      for (std::size_t j = 0; j < serial[i].report->rows.size(); ++j) {
        EXPECT_EQ(serial[i].report->rows[j].margin, parallel[i].report->rows[j].margin);
      }
    }
  }
}

TEST(VerifySurface, RowsOrderedByK) {
  const auto rep = q::verify_surface(q::perturbed_sphere(4, 200, 0.9, 0.05, 2), "p");
  EXPECT_EQ(rep.n, 4);
  EXPECT_EQ(rep.N, 200);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    EXPECT_LE(rep.rows[i - 1].k, rep.rows[i].k);
  }
  EXPECT_TRUE(rep.all_pass());
  EXPECT_THROW(q::verify_surface(q::perturbed_sphere(2, 400, 1.2, 0.5, 2), "bad"), q::precondition_error);
}

TEST(Refinement, MarginsStabilize) {
  const auto a = q::verify_surface(q::perturbed_sphere(3, 400, 0.9, 0.05, 2), "a", false);
  const auto b = q::verify_surface(q::perturbed_sphere(3, 800, 0.9, 0.05, 2), "b", false);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].check == "conjecture") {
      continue;
    }
    const double scale = std::max(std::abs(a.rows[i].lhs), std::abs(b.rows[i].lhs));
    EXPECT_LT(std::abs(a.rows[i].margin - b.rows[i].margin), 1e-4 * scale) << a.rows[i].check << a.rows[i].k;
  }
}
