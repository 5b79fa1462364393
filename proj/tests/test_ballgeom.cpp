#include "quermass/ballgeom.hpp"
#include "quermass/errors.hpp"
#include "quermass/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace q = quermass;
using q::pi;

TEST(BallProfile, QuarterRadiusInDimensionTwo) {
  const auto p = q::ball_profile(2, pi / 4);
  EXPECT_NEAR(p.area, 2 * pi, 1e-13);
  EXPECT_NEAR(p.sigma_int[1], 4 * pi, 1e-13);
  EXPECT_NEAR(p.sigma_int[2], 2 * pi, 1e-13);
  EXPECT_NEAR(p.vol, pi * pi / 2 - pi, 1e-12);
  EXPECT_NEAR(p.quermass[1], pi * pi + 2 * pi, 1e-12);
  EXPECT_NEAR(p.quermass[-1], p.vol, 0.0);
  EXPECT_NEAR(p.quermass[0], p.area, 0.0);
}

TEST(BallProfile, EquatorHasNoCurvature) {
  for (int n = 2; n <= 6; ++n) {
    const auto p = q::ball_profile(n, q::half_pi);
    EXPECT_NEAR(p.area, q::sphere_area(n), 1e-12);
    for (int k = 1; k <= n; ++k) {
      EXPECT_NEAR(p.sigma_int[static_cast<std::size_t>(k)], 0.0, 1e-13);
    }
  }
}

TEST(BallProfile, MatchesExtendedPrecisionOracle) {
  for (int n = 2; n <= 7; ++n) {
    for (double rho : {0.05, 0.4, 0.9, 1.3, 1.55}) {
      const auto p = q::ball_profile(n, rho);
      const auto ref = q::oracle::ball_quermass(n, rho);
      for (int k = -1; k <= n; ++k) {
        const double r = static_cast<double>(ref[static_cast<std::size_t>(k + 1)]);
        EXPECT_NEAR(p.quermass[k], r, 1e-12 * std::abs(r) + 1e-14) << n << " " << k << " " << rho;
      }
    }
  }
}

TEST(BallProfile, QuermassStrictlyIncreasing) {
  for (int n = 2; n <= 6; ++n) {
    for (int k = -1; k <= n - 1; ++k) {
      double prev = 0.0;
      for (int j = 1; j <= 200; ++j) {
        const double a = q::ball_quermass(n, k, q::half_pi * j / 200.0);
        EXPECT_GT(a, prev);
        prev = a;
      }
    }
  }
}

TEST(BallProfile, RejectsRadiusOutsideHemisphere) {
  EXPECT_THROW(q::ball_profile(2, 0.0), q::domain_error);
  EXPECT_THROW(q::ball_profile(2, 1.6), q::domain_error);
  EXPECT_THROW(q::ball_profile(2, -0.1), q::domain_error);
  EXPECT_THROW(q::ball_profile(1, 0.5), q::domain_error);
}

TEST(BallProfile, RadiusDerivativeUsesTheNextCurvatureIntegral) {
  // dA_{k-1}/drho = k int sigma_k; the pairing with int sigma_{k-1} is not what holds.
  const int n = 4;
  const double rho = 0.7;
  const double h = 1e-4;
  for (int k = 1; k <= n; ++k) {
    const double fd = q::oracle::central_difference4([&](double r) { return q::ball_quermass(n, k - 1, r); }, rho, h);
    const double expected = k * q::ball_sigma_integral(n, k, rho);
    const double other = k * q::ball_sigma_integral(n, k - 1, rho);
    EXPECT_NEAR(fd, expected, 1e-6 * std::abs(expected)) << k;
    EXPECT_GT(std::abs(fd - other), 1e-2 * std::abs(fd)) << k;
  }
  const double dvol = q::oracle::central_difference4([&](double r) { return q::ball_volume(n, r); }, rho, h);
  EXPECT_NEAR(dvol, q::ball_sigma_integral(n, 0, rho), 1e-8);
}

TEST(InvertQuermass, Examples) {
  EXPECT_NEAR(q::invert_quermass(2, 0, 2 * pi), pi / 4, 1e-12);
  EXPECT_DOUBLE_EQ(q::invert_quermass(2, 0, 4 * pi), q::half_pi);
  EXPECT_NEAR(q::invert_quermass(3, 1, q::ball_quermass(3, 1, 0.7)), 0.7, 1e-10);
}

// Radius uncertainty from rounding in A_k alone: eps |A| / |dA/drho|.
double radius_tolerance(int n, int k, double rho) {
  const double h = 1e-5;
  const double slope = std::abs(q::ball_quermass(n, k, rho + h) - q::ball_quermass(n, k, rho - h)) / (2.0 * h);
  const double a = std::abs(q::ball_quermass(n, k, rho));
  return std::max(1e-12, 16.0 * std::numeric_limits<double>::epsilon() * a / slope);
}

TEST(InvertQuermass, RoundTripAllIndices) {
  for (int n = 2; n <= 6; ++n) {
    for (int k = -1; k <= n - 1; ++k) {
      for (double rho : {0.01, 0.3, 0.8, 1.2, 1.5}) {
        EXPECT_NEAR(q::invert_quermass(n, k, q::ball_quermass(n, k, rho)), rho, radius_tolerance(n, k, rho))
            << n << " " << k;
      }
    }
  }
}

TEST(InvertQuermass, DomainErrors) {
  EXPECT_THROW(q::invert_quermass(2, 0, 0.0), q::domain_error);
  EXPECT_THROW(q::invert_quermass(2, 0, -1.0), q::domain_error);
  EXPECT_THROW(q::invert_quermass(2, 0, 4 * pi + 1e-9), q::domain_error);
  EXPECT_THROW(q::invert_quermass(2, 2, 1.0), q::domain_error);
  EXPECT_THROW(q::invert_quermass(2, -2, 1.0), q::domain_error);
}

TEST(QuermassInverter, AgreesWithBisection) {
  for (int n = 2; n <= 5; ++n) {
    for (int k = -1; k <= n - 1; ++k) {
      const q::QuermassInverter inv(n, k);
      for (double rho : {0.02, 0.5, 1.0, 1.5, 1.57}) {
        const double s = q::ball_quermass(n, k, rho);
        EXPECT_NEAR(inv(s), q::invert_quermass(n, k, s), 2.0 * radius_tolerance(n, k, rho)) << n << " " << k;
      }
    }
  }
}

TEST(MonotoneTable, InterpolatesAndBrackets) {
  std::vector<double> x{0, 1, 2, 3};
  std::vector<double> y{0, 1, 4, 9};
  const q::MonotoneTable t(x, y, 1);
  EXPECT_DOUBLE_EQ(t.interpolate(1.5), 2.5);
  const auto [lo, hi] = t.bracket(5.0);
  EXPECT_DOUBLE_EQ(lo, 2.0);
  EXPECT_DOUBLE_EQ(hi, 3.0);
  EXPECT_THROW(q::MonotoneTable({0, 1}, {1, 1}), q::computation_error);
  EXPECT_THROW(q::MonotoneTable({0}, {1}), q::domain_error);
}

TEST(Xi, ParametricDefinitionAndRoundTrip) {
  EXPECT_NEAR(q::xi(3, 1, -1, q::ball_volume(3, 0.5)), q::ball_quermass(3, 1, 0.5), 1e-12);
  for (int j = 1; j <= 50; ++j) {
    const double rho = q::half_pi * j / 51.0;
    const double s = q::ball_quermass(4, 0, rho);
    const double t = q::xi(4, 2, 0, s);
    EXPECT_NEAR(q::xi_inv(4, 2, 0, t), s, 1e-9 * s);
  }
  double prev = 0.0;
  for (int j = 1; j <= 50; ++j) {
    const double v = q::xi(3, 2, -1, q::ball_volume(3, q::half_pi * j / 51.0));
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(q::xi(3, 1, 1, 1.0), q::domain_error);
  EXPECT_THROW(q::xi(3, 3, 1, 1.0), q::domain_error);
  EXPECT_THROW(q::xi(3, 1, -1, 1e9), q::domain_error);
}

TEST(Eta, Examples) {
  EXPECT_NEAR(q::eta(2, 1, 2 * pi), 16 * pi * pi, 1e-10);
  EXPECT_NEAR(q::sqrt_eta(2, 1, 2 * pi), 4 * pi, 1e-11);
  EXPECT_NEAR(q::eta1_closed(2, 2 * pi), 16 * pi * pi, 1e-10);
  EXPECT_NEAR(q::eta(3, 0, 4 * pi * pi / 3), 4 * std::pow(pi, 4), 1e-9);
}

TEST(Eta, PositiveAndVanishesAtTheEquator) {
  for (int n = 2; n <= 6; ++n) {
    for (int k = 0; k <= n - 1; ++k) {
      const double top = q::hemisphere_quermass(n, k - 1);
      for (int j = 1; j < 50; ++j) {
        EXPECT_GT(q::eta(n, k, top * j / 50.0), 0.0);
      }
      if (k >= 1) {
        EXPECT_NEAR(q::eta(n, k, top), 0.0, 1e-24);
        EXPECT_LT(q::eta(n, k, top * (1 - 1e-9)), 1e-3 * q::eta(n, k, 0.5 * top));
      }
    }
  }
  EXPECT_THROW(q::eta(3, 3, 1.0), q::domain_error);
  EXPECT_THROW(q::eta(3, -1, 1.0), q::domain_error);
  EXPECT_THROW(q::eta(3, 1, 0.0), q::domain_error);
}

TEST(Eta1Closed, MatchesParametricAndItsOde) {
  for (int n = 2; n <= 6; ++n) {
    const double s0 = q::sphere_area(n);
    for (int j = 0; j < 100; ++j) {
      const double s = s0 * (0.05 + 0.9 * j / 99.0);
      const double e = q::eta1_closed(n, s);
      EXPECT_NEAR(q::eta(n, 1, s), e, 1e-8 * e);
      const double lhs = 2.0 * (n - 1.0) / n * e;
      const double rhs = (2.0 * n * s + q::eta1_closed_derivative(n, s)) * s;
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
      EXPECT_NEAR(q::eta_ode_rhs(n, 1, s, e), q::eta1_closed_derivative(n, s),
                  1e-9 * (std::abs(q::eta1_closed_derivative(n, s)) + e / s));
    }
  }
  EXPECT_THROW(q::eta1_closed(2, 0.0), q::domain_error);
  EXPECT_THROW(q::eta1_closed(2, 4 * pi + 1.0), q::domain_error);
}

TEST(EtaOde, RhsMatchesFiniteDifferences) {
  const double s = q::ball_quermass(3, 1, 0.6);
  const double fd = q::oracle::central_difference4([](double x) { return q::eta(3, 2, x); }, s, 1e-4);
  const double rhs = q::eta_ode_rhs(3, 2, s, q::eta(3, 2, s));
  EXPECT_NEAR(rhs, fd, 1e-4 * std::abs(fd));
}

TEST(EtaOde, AlternativeCoefficientIsRejectedByFiniteDifferences) {
  const int n = 4;
  const int k = 2;
  const double s = q::ball_quermass(n, k - 1, 0.8);
  const double e = q::eta(n, k, s);
  const double b = q::eta_ode_b(n, k, s);
  const double fd = q::oracle::central_difference4([&](double x) { return q::eta(n, k, x); }, s, 1e-4);
  const double alt = (2.0 * k * (n - k) / (n - k + 1.0) * e - 2.0 * (n - k + 2) * b * b) / (k * b);
  EXPECT_NEAR(q::eta_ode_rhs(n, k, s, e), fd, 1e-6 * std::abs(fd));
  EXPECT_GT(std::abs(alt - fd), 0.1 * std::abs(fd));
}

TEST(EtaOde, BIsTheLowerCurvatureIntegral) {
  for (int n = 2; n <= 6; ++n) {
    for (int k = 1; k <= n - 1; ++k) {
      const double top = q::hemisphere_quermass(n, k - 1);
      for (int j = 1; j <= 50; ++j) {
        const double s = top * j / 51.0;
        const double b = q::eta_ode_b(n, k, s);
        EXPECT_GT(b, 0.0);
        const double rho = q::invert_quermass(n, k - 1, s);
        EXPECT_NEAR(b, q::ball_sigma_integral(n, k - 1, rho), 1e-9 * std::max(1.0, b));
      }
    }
  }
}

TEST(EtaOde, RhsPreconditions) {
  EXPECT_THROW(q::eta_ode_rhs(3, 2, 1.0, 0.0), q::precondition_error);
  EXPECT_THROW(q::eta_ode_rhs(3, 2, 1.0, -1.0), q::precondition_error);
  EXPECT_THROW(q::eta_ode_b(3, 3, 1.0), q::domain_error);
}

TEST(EtaOdeIntegrate, ClosedFormInDimensionTwo) {
  std::vector<double> grid;
  for (int j = 1; j <= 25; ++j) {
    grid.push_back(0.5 + 2.5 * j / 25.0);
  }
  const auto ys = q::eta_ode_integrate(2, 1, 0.5, q::eta1_closed(2, 0.5), grid);
  ASSERT_EQ(ys.size(), grid.size() + 1);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    EXPECT_NEAR(ys[j + 1], q::eta1_closed(2, grid[j]), 1e-6 * q::eta1_closed(2, grid[j]));
  }
}

TEST(EtaOdeIntegrate, MiddleHalfInDimensionFour) {
  const double top = q::hemisphere_quermass(4, 2);
  std::vector<double> grid;
  for (int j = 1; j <= 20; ++j) {
    grid.push_back(top * (0.25 + 0.5 * j / 20.0));
  }
  const double s0 = 0.25 * top;
  const auto ys = q::eta_ode_integrate(4, 3, s0, q::eta(4, 3, s0), grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double ref = q::eta(4, 3, grid[j]);
    EXPECT_NEAR(ys[j + 1], ref, 1e-4 * ref);
  }
}

TEST(EtaOdeIntegrate, EmptyGridAndDomainExit) {
  const auto ys = q::eta_ode_integrate(3, 2, 1.0, 2.0, std::vector<double>{});
  ASSERT_EQ(ys.size(), 1u);
  EXPECT_EQ(ys[0], 2.0);
  const double top = q::hemisphere_quermass(3, 1);
  EXPECT_THROW(q::eta_ode_integrate(3, 2, 0.5 * top, q::eta(3, 2, 0.5 * top), std::vector<double>{1.2 * top}),
               q::computation_error);
  EXPECT_THROW(q::eta_ode_integrate(3, 0, 1.0, 1.0, std::vector<double>{}), q::domain_error);
}
