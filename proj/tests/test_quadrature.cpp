#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lowbend/quadrature.hpp"

using namespace lowbend;

namespace {

double integrate(const QuadratureRule& q, double (*f)(const Eigen::VectorXd&)) {
  double s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
  return s;
}

}  // namespace

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  std::vector<double> x, w;
  for (int n : {1, 3, 6, 12}) {
    gauss_legendre(n, x, w);
    ASSERT_EQ(static_cast<int>(x.size()), n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " deg=" << deg;
    }
  }
}

TEST(Quadrature, UnitBallVolume) {
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4 * std::numbers::pi / 3, 1e-15);
}

TEST(Quadrature, RadialAngularWeights) {
  for (int m : {2, 3}) {
    const QuadratureRule q = radial_angular(m, 6, 24);
    EXPECT_FALSE(q.random);
    EXPECT_NEAR(q.weight_sum(), unit_ball_volume(m), 1e-13);
    for (double w : q.weights) EXPECT_GT(w, 0.0);
    for (const auto& n : q.nodes) EXPECT_LT(n.norm(), 1.0);
    // int_B |w|^2 = m / (m + 2) |B|
    const double r2 = integrate(q, [](const Eigen::VectorXd& w) { return w.squaredNorm(); });
    EXPECT_NEAR(r2, m / (m + 2.0) * unit_ball_volume(m), 1e-13);
    // odd moments vanish
    EXPECT_NEAR(integrate(q, [](const Eigen::VectorXd& w) { return w[0] * w[1] * w[1]; }), 0.0, 1e-14);
  }
}

TEST(Quadrature, AnnulusWeights) {
  for (int m : {2, 3}) {
    const QuadratureRule q = radial_angular(m, 5, 16, 0.3);
    EXPECT_NEAR(q.weight_sum(), unit_ball_volume(m) * (1 - std::pow(0.3, m)), 1e-13);
    for (const auto& n : q.nodes) EXPECT_GE(n.norm(), 0.3);
  }
}

TEST(Quadrature, MonteCarloBall) {
  const QuadratureRule q = mc_ball(3, 20000, StreamKey(1, "mc-ball"));
  EXPECT_TRUE(q.random);
  EXPECT_NEAR(q.weight_sum(), unit_ball_volume(3), 1e-12);
  const double r2 = integrate(q, [](const Eigen::VectorXd& w) { return w.squaredNorm(); });
  EXPECT_NEAR(r2, 0.6 * unit_ball_volume(3), 0.02);
  const QuadratureRule again = mc_ball(3, 20000, StreamKey(1, "mc-ball"));
  EXPECT_EQ(again.nodes[123], q.nodes[123]);
}

TEST(Quadrature, ProductRuleOnBox) {
  const QuadratureRule q = product_gauss_legendre(Eigen::Vector2d(0, -1), Eigen::Vector2d(2, 3), 4);
  EXPECT_EQ(q.size(), 16u);
  EXPECT_NEAR(q.weight_sum(), 8.0, 1e-14);
  // int_0^2 x^3 dx * int_-1^3 y^2 dy = 4 * 28/3
  EXPECT_NEAR(integrate(q, [](const Eigen::VectorXd& p) { return p[0] * p[0] * p[0] * p[1] * p[1]; }), 112.0 / 3,
              1e-12);
}

TEST(Quadrature, SpecBuildsChosenScheme) {
  QuadratureSpec s;
  EXPECT_FALSE(s.build(2).random);
  s.scheme = QuadratureSpec::Scheme::MonteCarlo;
  s.mc_nodes = 100;
  EXPECT_EQ(s.build(2).size(), 100u);
  EXPECT_TRUE(s.build(2).random);
}
