#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lowbend/limit_verify.hpp"
#include "lowbend/loss.hpp"

using namespace lowbend;

namespace {

constexpr double kPi = std::numbers::pi;

// The penalty written exactly as its defining formula.
double gamma_oracle(double s, double c) { return s * s + std::pow(1 + c * c, 2) / (s * s + c * c) - 2 - c * c; }

Embedding inclusion() {
  return [](const Eigen::VectorXd& c) -> Eigen::VectorXd { return c; };
}

SamplingStrategy klein_s1(double eps) {
  SamplingStrategy s;
  s.tag = StrategyTag::S1;
  s.epsilon = eps;
  s.window = klein_window();
  return s;
}

std::vector<SampleTriple> hemisphere_triples(std::size_t n, std::uint64_t seed) {
  SamplingStrategy s;
  s.tag = StrategyTag::S1;
  s.epsilon = kPi / 4;
  s.min_dist = 0.01 * kPi;
  RngStream rng(StreamKey(seed, "loss-triples"));
  return sample_triples(ManifoldKind::Hemisphere, s, n, rng);
}

}  // namespace

TEST(Loss, GammaValues) {
  for (double c : {0.3, 1.0, 2.5}) {
    EXPECT_EQ(gamma(1.0, c), 0.0);
    EXPECT_NEAR(gamma(0.0, c), 1 / (c * c), 1e-14);
  }
  EXPECT_NEAR(gamma(2.0, 1.0), 4 + 4.0 / 5 - 3, 1e-15);
  EXPECT_NEAR(gamma(2.0, 1.0), 1.8, 1e-15);
  for (double s = 0; s <= 3; s += 0.05)
    for (double c : {0.5, 1.0, 2.0}) EXPECT_NEAR(gamma(s, c), gamma_oracle(s, c), 1e-12);
}

TEST(Loss, GammaPositiveAwayFromOne) {
  for (double s = 0; s <= 3; s += 0.01) {
    if (std::abs(s - 1) < 1e-9) continue;
    EXPECT_GT(gamma(s, 1.0), 0.0) << s;
  }
}

TEST(Loss, GammaDerivativeMatchesDifferences) {
  const double h = 1e-6;
  for (double c : {0.5, 1.0, 2.0})
    for (double s = 0.05; s < 3; s += 0.1)
      EXPECT_NEAR(gamma_derivative(s, c), (gamma(s + h, c) - gamma(s - h, c)) / (2 * h), 1e-7);
}

// The penalty is convex away from the origin only. Its second derivative at
// zero is 2 - 2 (1 + c^2)^2 / c^4 < 0, so convexity on all of [0, 3] fails.
TEST(Loss, GammaCurvature) {
  const double h = 1e-3;
  auto second = [h](double s, double c) { return (gamma(s + h, c) - 2 * gamma(s, c) + gamma(s - h, c)) / (h * h); };
  for (double c : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(second(0.0, c), 2 - 2 * std::pow(1 + c * c, 2) / std::pow(c, 4), 1e-3);
    EXPECT_LT(second(0.0, c), 0.0);
    for (double s = 0.6; s <= 3.0; s += 0.01) EXPECT_GT(second(s, c), 0.0) << "c=" << c << " s=" << s;
  }
}

TEST(Loss, DiffQuotients) {
  const Eigen::Vector3d a(1, 2, 3);
  EXPECT_EQ(diff_quotient_1(a, a, 0.3).norm(), 0.0);
  EXPECT_EQ(diff_quotient_2(a, a, a, 0.3).norm(), 0.0);
  EXPECT_THROW(diff_quotient_1(a, a, 0.0), Error);

  const ManifoldPoint e3 = make_point(ManifoldKind::Hemisphere, Eigen::Vector3d(0, 0, 1));
  const ManifoldPoint e1 = make_point(ManifoldKind::Hemisphere, Eigen::Vector3d(1, 0, 0));
  const SampleTriple t = make_triple(e3, e1);
  const double d = kPi / 2;
  EXPECT_NEAR(diff_quotient_1(t, inclusion()).norm(), 2 * std::sin(d / 2) / d, 1e-15);
  EXPECT_NEAR(diff_quotient_2(t, inclusion()).norm(), 8 * (1 - std::cos(d / 2)) / (d * d), 1e-15);
  EXPECT_NEAR(diff_quotient_1(t, inclusion()).norm(), 2 * std::sqrt(2.0) / kPi, 1e-15);
  EXPECT_NEAR(diff_quotient_2(t, inclusion()).norm(), (32 - 16 * std::sqrt(2.0)) / (kPi * kPi), 1e-15);
}

TEST(Loss, DiscreteLossSinglePair) {
  const ManifoldPoint e3 = make_point(ManifoldKind::Hemisphere, Eigen::Vector3d(0, 0, 1));
  const ManifoldPoint e1 = make_point(ManifoldKind::Hemisphere, Eigen::Vector3d(1, 0, 0));
  const std::vector<SampleTriple> tr{make_triple(e3, e1)};
  const LossBreakdown l = discrete_loss(tr, inclusion(), LossWeights{1.0, 1.0, 0.0});
  const double s = 2 * std::sqrt(2.0) / kPi;
  const double b = (32 - 16 * std::sqrt(2.0)) / (kPi * kPi);
  EXPECT_NEAR(l.isometry, gamma_oracle(s, 1.0), 1e-14);
  EXPECT_NEAR(l.bending, b * b, 1e-14);
  // rounded reference figures
  EXPECT_NEAR(l.isometry, 0.0200, 5e-4);
  EXPECT_NEAR(l.bending, 0.9013, 1e-3);
  EXPECT_EQ(l.total, l.isometry + l.bending);
}

TEST(Loss, EmptySetRaises) {
  try {
    discrete_loss({}, inclusion(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySampleSet);
  }
}

TEST(Loss, FlatLinearIsZero) {
  const auto emb = flat_linear(ManifoldKind::KleinBottle, klein_window());
  RngStream rng(StreamKey(21, "flat"));
  const auto tr = sample_triples(ManifoldKind::KleinBottle, klein_s1(0.2), 500, rng);
  const LossBreakdown l = discrete_loss(tr, emb.phi, {});
  EXPECT_LT(l.total, 1e-24);
  for (const auto& t : tr) {
    EXPECT_NEAR(diff_quotient_1(t, emb.phi).norm(), 1.0, 1e-12);
    EXPECT_LT(diff_quotient_2(t, emb.phi).norm(), 1e-10);
  }
}

TEST(Loss, RigidMotionInvariance) {
  const auto tr = hemisphere_triples(200, 22);
  RngStream rng(StreamKey(22, "rigid"));
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return rng.normal(); });
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    ASSERT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-14);
    const Eigen::Vector3d b(rng.normal(), rng.normal(), rng.normal());
    const Embedding moved = [&](const Eigen::VectorXd& c) -> Eigen::VectorXd { return q * c + b; };
    const double base = discrete_loss(tr, inclusion(), {}).total;
    EXPECT_NEAR(discrete_loss(tr, moved, {}).total, base, 1e-12 * base);
  }
}

TEST(Loss, ConcatenationIsWeightedAverage) {
  const auto a = hemisphere_triples(70, 23);
  const auto b = hemisphere_triples(130, 24);
  std::vector<SampleTriple> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const Embedding phi = [](const Eigen::VectorXd& c) -> Eigen::VectorXd {
    return Eigen::Vector2d(c[0] * c[1], std::sin(c[2]));
  };
  const LossWeights w{0.7, 1.3, 0.0};
  const double la = discrete_loss(a, phi, w).total;
  const double lb = discrete_loss(b, phi, w).total;
  EXPECT_NEAR(discrete_loss(ab, phi, w).total, (70 * la + 130 * lb) / 200, 1e-12);
}

TEST(Loss, PairGradientMatchesDifferences) {
  RngStream rng(StreamKey(25, "pair-grad"));
  const LossWeights w{0.8, 1.2, 0.0};
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(4), y(4), m(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
      m[i] = rng.normal();
    }
    const double d = rng.uniform(0.2, 1.5);
    const PairGradient g = pair_gradient(x, y, m, d, w);
    auto f = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
      const PairTerms t = pair_terms(a, b, c, d, w.c);
      return t.isometry + w.lambda * t.bending;
    };
    const double h = 1e-6;
    auto tol = [](double v) { return 1e-6 * std::max(1.0, std::abs(v)); };
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(4);
      e[i] = h;
      EXPECT_NEAR(g.d_x[i], (f(x + e, y, m) - f(x - e, y, m)) / (2 * h), tol(g.d_x[i]));
      EXPECT_NEAR(g.d_y[i], (f(x, y + e, m) - f(x, y - e, m)) / (2 * h), tol(g.d_y[i]));
      EXPECT_NEAR(g.d_mid[i], (f(x, y, m + e) - f(x, y, m - e)) / (2 * h), tol(g.d_mid[i]));
    }
  }
}

TEST(Loss, ReconstructionExamples) {
  const auto tr = hemisphere_triples(50, 26);
  EXPECT_EQ(reconstruction_loss(tr, inclusion(), inclusion()), 0.0);
  const Embedding zero = [](const Eigen::VectorXd& z) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(z.size()); };
  double expect = 0;
  for (const auto& t : tr) expect += 0.5 * (t.x.coords.squaredNorm() / 3 + t.y.coords.squaredNorm() / 3);
  EXPECT_NEAR(reconstruction_loss(tr, inclusion(), zero), expect / tr.size(), 1e-15);

  const Embedding enc = [](const Eigen::VectorXd& c) -> Eigen::VectorXd { return c.head(2); };
  const Embedding dec = [](const Eigen::VectorXd& z) -> Eigen::VectorXd { return Eigen::Vector3d(z[0], z[1], 0.5); };
  std::vector<SampleTriple> swapped = tr;
  for (auto& t : swapped) std::swap(t.x, t.y);
  EXPECT_NEAR(reconstruction_loss(tr, enc, dec), reconstruction_loss(swapped, enc, dec), 1e-15);

  const Embedding bad = [](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::Vector2d(0, 0); };
  EXPECT_THROW(reconstruction_loss(tr, enc, bad), Error);
}

TEST(Loss, WeightedTotalInvariant) {
  const LossWeights w{0.3, 1.0, 2.0};
  EXPECT_NEAR(weighted_total(1.5, 2.0, 0.25, w), 1.5 + 0.3 * 2.0 + 2.0 * 0.25, 1e-15);
}

TEST(Loss, McFlatLinearIsZero) {
  const auto emb = flat_linear(ManifoldKind::KleinBottle, klein_window());
  const LossBreakdown l = mc_continuous_loss(ManifoldKind::KleinBottle, emb.phi, klein_s1(0.1), 5000, {},
                                             StreamKey(27, "mc-flat"));
  EXPECT_LT(l.total, 1e-20);
  EXPECT_LT(l.stderr_total, 1e-12);
}

TEST(Loss, McDeterministic) {
  SamplingStrategy s;
  s.tag = StrategyTag::S1;
  s.epsilon = 0.3;
  const auto a = mc_continuous_loss(ManifoldKind::Hemisphere, inclusion(), s, 10000, {}, StreamKey(28, "mc"));
  const auto b = mc_continuous_loss(ManifoldKind::Hemisphere, inclusion(), s, 10000, {}, StreamKey(28, "mc"));
  EXPECT_EQ(a.total, b.total);
  EXPECT_EQ(a.stderr_total, b.stderr_total);
}

TEST(Loss, McStderrRate) {
  SamplingStrategy s;
  s.tag = StrategyTag::S1;
  s.epsilon = 0.5;
  std::vector<double> n, se;
  for (std::size_t k : {100, 1000, 10000, 100000}) {
    const auto l = mc_continuous_loss(ManifoldKind::Hemisphere, inclusion(), s, k, {}, StreamKey(29, "rate"));
    n.push_back(static_cast<double>(k));
    se.push_back(l.stderr_total);
  }
  EXPECT_NEAR(loglog_slope(n, se), -0.5, 0.1);
}

TEST(Loss, McUnbiasedAcrossStreams) {
  SamplingStrategy s;
  s.tag = StrategyTag::S2;
  s.epsilon = 0.4;
  const auto a = mc_continuous_loss(ManifoldKind::Hemisphere, inclusion(), s, 200000, {}, StreamKey(30, "a"));
  const auto b = mc_continuous_loss(ManifoldKind::Hemisphere, inclusion(), s, 200000, {}, StreamKey(31, "b"));
  EXPECT_LT(std::abs(a.total - b.total), 3 * std::hypot(a.stderr_total, b.stderr_total));
}
