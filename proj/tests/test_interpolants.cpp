#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace mcuq;
using namespace mcuq::testing;

TEST(DividedDifference, Basics) {
  EXPECT_DOUBLE_EQ(divided_difference({{0, 2}, {1, 4}}), 2.0);
  EXPECT_DOUBLE_EQ(divided_difference({{-1, 1}, {0, 0}, {1, 1}}), 1.0);
  EXPECT_THROW(divided_difference({{0, 1}, {0, 2}}), std::invalid_argument);
}

TEST(DividedDifference, FourPointLeadingCoefficient) {
  // Leading coefficient of the interpolating cubic (sympy, exact rationals).
  EXPECT_NEAR(divided_difference({{-0.5, 1.3}, {0.25, -0.7}, {1.1, 2.9}, {2.0, 0.4}}), -3.3284780578898226, 1e-13);
}

TEST(DividedDifference, OrderInvariant) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 0; n < 100; ++n) {
    std::vector<std::pair<double, double>> p;
    for (int q = 0; q < 4; ++q) p.push_back({q + 0.3 * u(rng), u(rng)});
    const double a = divided_difference(std::span<const std::pair<double, double>>(p));
    std::reverse(p.begin(), p.end());
    EXPECT_NEAR(divided_difference(std::span<const std::pair<double, double>>(p)), a, 1e-12);
  }
}

TEST(LinearCrossing, Examples) {
  EXPECT_DOUBLE_EQ(linear_crossing(-1, 1, 0).alpha, 0.5);
  EXPECT_DOUBLE_EQ(linear_crossing(0, 4, 1).alpha, 0.25);
  EXPECT_THROW(linear_crossing(2, 2, 2), DegenerateEdgeError);
  EXPECT_THROW(linear_crossing(1, 2, 3), NoCrossingError);
}

TEST(CubicCrossing, ReproducesLinear) {
  const double h = 0.3;
  const auto c = cubic_crossing(EdgeStencil(-h, 0, h, 2 * h, h), h / 2);
  EXPECT_TRUE(c.valid);
  EXPECT_NEAR(c.alpha, 0.5, 1e-15);
}

TEST(CubicCrossing, CubicDataIsExact) {
  // x^3 on nodes -1..2, k = 1/8; bisection oracle gives 0.5.
  const auto c = cubic_crossing(EdgeStencil(-1, 0, 1, 8, 1.0), 0.125);
  EXPECT_NEAR(c.alpha, 0.5, 1e-14);
  const auto centered = cubic_crossing(EdgeStencil(-1, 0, 1, 8, 1.0), 0.125, DerivativeScheme::Centered);
  EXPECT_TRUE(centered.valid);
}

TEST(CubicCrossing, SinStencilMatchesOracle) {
  const double x0 = 0.3, h = 0.2;
  auto f = [&](int m) { return std::sin(x0 + m * h); };
  const auto c = cubic_crossing(EdgeStencil(f(-1), f(0), f(1), f(2), h), std::sin(0.37));
  EXPECT_NEAR(c.alpha, 0.35006932653902621, 1e-13);
}

TEST(CubicCrossing, MedianOfThreeRoots) {
  // Hermite data with steep opposite end slopes crosses k three times.
  const auto roots = roots_in_unit_interval(hermite_poly(-1, 1, 12, 12));
  ASSERT_EQ(roots.size(), 3u);
  const auto c = hermite_crossing(-1, 1, 12, 12, 0.0);
  EXPECT_TRUE(c.valid);
  EXPECT_NEAR(c.alpha, roots[1], 1e-14);
  EXPECT_NEAR(c.alpha, 0.5, 1e-14);
}

TEST(CubicCrossing, IsovalueAtEndpoint) {
  const EdgeStencil s(-0.5, 0.0, 1.0, 1.5, 1.0);
  EXPECT_NEAR(cubic_crossing(s, 0.0).alpha, 0.0, 1e-12);
  EXPECT_NEAR(cubic_crossing(s, 1.0).alpha, 1.0, 1e-12);
}

TEST(Weno, LinearDataGivesLinearWeights) {
  const auto [c, d] = weno_crossing(WenoStencil({-3, -2, -1, 0, 1, 2, 3}, 1.0), 0.25);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(d.weights[j], WenoDiagnostics::gammas[j], 1e-10);
  EXPECT_NEAR(d.betas[0], d.betas[1], 1e-15);
  EXPECT_NEAR(d.betas[1], d.betas[2], 1e-15);
  EXPECT_NEAR(c.alpha, 0.25, 1e-14);
}

TEST(Weno, ConstantDataHasNoCrossing) {
  EXPECT_THROW(weno_crossing(WenoStencil({2, 2, 2, 2, 2, 2, 2}, 1.0), 2.0), DegenerateEdgeError);
}

TEST(Weno, SinStencilMatchesOracle) {
  const double x0 = 0.3, h = 0.2;
  std::array<double, 7> v{};
  for (int m = -3; m <= 3; ++m) v[static_cast<std::size_t>(m + 3)] = std::sin(x0 + m * h);
  const auto [c, d] = weno_crossing(WenoStencil(v, h), std::sin(0.37));
  EXPECT_NEAR(d.betas[0], 0.037535598885440617, 1e-15);
  EXPECT_NEAR(d.betas[1], 0.036172914413510801, 1e-15);
  EXPECT_NEAR(d.betas[2], 0.037823272472967304, 1e-15);
  EXPECT_NEAR(d.weights[0], 0.096014449342238041, 1e-12);
  EXPECT_NEAR(d.weights[1], 0.62030698489779101, 1e-12);
  EXPECT_NEAR(d.weights[2], 0.28367856575997095, 1e-12);
  EXPECT_NEAR(c.alpha, 0.35000192713034677, 1e-12);
}

TEST(Weno, StepDataFavoursSmoothSide) {
  // Smooth (zero) on the left, a jump on the right substencil.
  const WenoStencil s({0, 0, 0, 0, 1, 10, 10}, 1.0);
  const auto [c, d] = weno_crossing(s, 0.5);
  EXPECT_LT(d.weights[2], 0.01 * d.weights[0]);
  EXPECT_GE(c.alpha, 0.0);
  EXPECT_LE(c.alpha, 1.0);
  // Close to the left-biased substencil on its own.
  std::array<double, 5> left{0, 0, 0, 0, 1};
  Poly4 p = lagrange_quartic(-3, left);
  p[0] -= 0.5;
  const auto roots = roots_in_unit_interval(p);
  ASSERT_FALSE(roots.empty());
  EXPECT_NEAR(c.alpha, median_root(roots), 0.05);
}

TEST(Weno, WeightsConvexOnRandomStencils) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 10000; ++n) {
    std::array<double, 7> v{};
    for (auto& x : v) x = u(rng);
    const auto d = weno_weights(WenoStencil(v, 1.0));
    double sum = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_GE(d.betas[j], 0.0);
      EXPECT_GE(d.weights[j], 0.0);
      sum += d.weights[j];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Convergence, FittedOrders) {
  EXPECT_GE(fitted_order(Method::Linear), 1.5);
  EXPECT_GE(fitted_order(Method::Cubic), 3.5);
  EXPECT_GE(fitted_order(Method::Weno), 4.0);
}

TEST(Convergence, CenteredSchemeIsThirdOrder) {
  auto err = [](double h) {
    const double xs = 0.47, k = std::sin(xs);
    const auto i = static_cast<long>(std::floor(xs / h));
    auto f = [&](long m) { return std::sin(static_cast<double>(i + m) * h); };
    const double a = cubic_crossing(EdgeStencil(f(-1), f(0), f(1), f(2), h), k, DerivativeScheme::Centered).alpha;
    return std::abs((static_cast<double>(i) + a) * h - xs);
  };
  const double order = std::log(err(0.1) / err(0.025)) / std::log(4.0);
  EXPECT_GT(order, 2.5);
  EXPECT_LT(order, 3.6);
}

TEST(Tricubic, CornerInterpolation) {
  const ScalarGrid g = field_grid(FieldKind::Tangle, 9);
  const CellId c{3, 4, 2};
  EXPECT_EQ(tricubic_eval(g, c, {0, 0, 0}), g.at(c));
  EXPECT_NEAR(tricubic_eval(g, c, {1, 1, 1}), g.at(4, 5, 3), 1e-14);
}

TEST(Tricubic, ReproducesPolynomials) {
  std::vector<double> lin, cubic;
  const Dims d{7, 7, 7};
  for (std::size_t k = 0; k < 7; ++k)
    for (std::size_t j = 0; j < 7; ++j)
      for (std::size_t i = 0; i < 7; ++i) {
        const double x = 0.5 * i, y = 0.5 * j, z = 0.5 * k;
        lin.push_back(x + 2 * y + 3 * z);
        cubic.push_back(x * x * x * y * y * z);
      }
  const ScalarGrid gl(d, {}, {0.5, 0.5, 0.5}, lin), gc(d, {}, {0.5, 0.5, 0.5}, cubic);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 200; ++n) {
    const Vec3 t{u(rng), u(rng), u(rng)};
    const CellId c{2, 3, 1};
    const Vec3 p = gl.position(c) + t * 0.5;
    EXPECT_NEAR(tricubic_eval(gl, c, t), p.x + 2 * p.y + 3 * p.z, 1e-12);
    EXPECT_NEAR(tricubic_eval(gc, c, t), p.x * p.x * p.x * p.y * p.y * p.z, 1e-10);
  }
}

TEST(Trilinear, GradientMatchesFiniteDifference) {
  const ScalarGrid g = field_grid(FieldKind::Tangle, 9);
  const CellId c{2, 3, 4};
  const Vec3 t{0.3, 0.6, 0.2};
  const auto s = trilinear_sample(g, c, t);
  const double e = 1e-6;
  EXPECT_NEAR(s.gradient_local.x, (trilinear_eval(g, c, t + Vec3{e, 0, 0}) - trilinear_eval(g, c, t - Vec3{e, 0, 0})) / (2 * e), 1e-7);
  EXPECT_NEAR(s.value, trilinear_eval(g, c, t), 1e-15);
}
