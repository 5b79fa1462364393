#include "quermass/errors.hpp"
#include "quermass/math.hpp"
#include "quermass/oracles.hpp"
#include "quermass/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace q = quermass;

TEST(Math, SphereAreaAgreesWithRecursion) {
  EXPECT_NEAR(q::sphere_area(1), 2 * q::pi, 1e-14);
  EXPECT_NEAR(q::sphere_area(2), 4 * q::pi, 1e-14);
  EXPECT_NEAR(q::sphere_area(3), 2 * q::pi * q::pi, 1e-13);
  for (int n = 1; n <= 12; ++n) {
    EXPECT_NEAR(q::sphere_area(n), static_cast<double>(q::oracle::sphere_area(n)), 1e-14 * q::sphere_area(n));
  }
}

TEST(Math, Binomial) {
  EXPECT_EQ(q::binomial(5, 2), 10.0);
  EXPECT_EQ(q::binomial(5, 0), 1.0);
  EXPECT_EQ(q::binomial(5, 6), 0.0);
  EXPECT_EQ(q::binomial(5, -1), 0.0);
}

TEST(Quadrature, AdaptiveSimpsonPolynomialAndTrig) {
  EXPECT_NEAR(q::adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0), 4.0, 1e-13);
  EXPECT_NEAR(q::adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0), std::exp(1.0) - 1.0, 1e-12);
  EXPECT_EQ(q::adaptive_simpson([](double x) { return x; }, 1.0, 1.0), 0.0);
}

TEST(Quadrature, CompositeSimpson) {
  std::vector<double> v(11);
  const double h = 0.1;
  for (int i = 0; i <= 10; ++i) {
    const double x = h * i;
    v[static_cast<std::size_t>(i)] = x * x * x;
  }
  EXPECT_NEAR(q::composite_simpson(v, h), 0.25, 1e-14);
  std::vector<double> odd(4, 1.0);
  EXPECT_THROW(q::composite_simpson(odd, 0.1), q::domain_error);
}

TEST(Quadrature, SinPowerAgainstReduction) {
  for (int n = 0; n <= 9; ++n) {
    for (double x : {0.0, 0.1, 0.7, 1.3, q::half_pi}) {
      EXPECT_NEAR(q::sin_power_integral(n, x), static_cast<double>(q::oracle::sin_power_integral(n, x)), 1e-12)
          << n << " " << x;
    }
  }
}

TEST(Quadrature, SinPowerRelativeAtSmallLimits) {
  for (int n = 1; n <= 7; ++n) {
    const double exact = static_cast<double>(q::oracle::sin_power_integral(n, 0.05L));
    EXPECT_NEAR(q::sin_power_integral(n, 0.05) / exact, 1.0, 1e-9) << n;
  }
  const double b = 0.3 + 1e-9;
  EXPECT_NEAR(q::sin_power_segment(4, 0.3, b) / (std::pow(std::sin(0.3 + 0.5 * (b - 0.3)), 4) * (b - 0.3)), 1.0, 1e-14);
  EXPECT_THROW(q::sin_power_segment(-1, 0.0, 1.0), q::domain_error);
}

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  const auto rule = q::gauss_legendre(5);
  double s0 = 0.0;
  double s8 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s0 += rule.weights[i];
    s8 += rule.weights[i] * std::pow(rule.nodes[i], 8);
  }
  EXPECT_NEAR(s0, 2.0, 1e-15);
  EXPECT_NEAR(s8, 2.0 / 9.0, 1e-15);
  EXPECT_THROW(q::gauss_legendre(0), q::domain_error);
}

TEST(Quadrature, SinPowerBatchMatchesSingle) {
  const std::vector<double> xs{0.9, 0.1, 0.5, 0.5, 1.4};
  const auto batch = q::sin_power_integrals(3, xs);
  ASSERT_EQ(batch.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_NEAR(batch[i], q::sin_power_integral(3, xs[i]), 1e-12);
  }
}
