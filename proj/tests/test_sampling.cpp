#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "lowbend/render.hpp"
#include "lowbend/sampling.hpp"

using namespace lowbend;

namespace {

constexpr double kPi = std::numbers::pi;

double ks_statistic(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

// Critical value of the two-sided KS test at alpha = 0.01.
double ks_critical(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

SamplingStrategy strategy(StrategyTag tag, double eps, double min_dist) {
  SamplingStrategy s;
  s.tag = tag;
  s.epsilon = eps;
  s.min_dist = min_dist;
  return s;
}

}  // namespace

TEST(Sampling, StrategyNames) {
  for (StrategyTag t : {StrategyTag::S1, StrategyTag::S2, StrategyTag::S3})
    EXPECT_EQ(strategy_from_string(to_string(t)), t);
}

TEST(Sampling, ValidateRejectsBadRadii) {
  EXPECT_THROW(strategy(StrategyTag::S1, 0.1, 0.2).validate(ManifoldKind::KleinBottle), Error);
  EXPECT_THROW(strategy(StrategyTag::S1, 0.6, 0.0).validate(ManifoldKind::KleinBottle), Error);
  EXPECT_NO_THROW(strategy(StrategyTag::S1, 0.5, 0.0).validate(ManifoldKind::KleinBottle));
}

TEST(Sampling, PostconditionAudit) {
  for (ManifoldKind k : kAllKinds) {
    for (StrategyTag tag : {StrategyTag::S1, StrategyTag::S2, StrategyTag::S3}) {
      const auto s = strategy(tag, injectivity_bound(k) / 2, default_min_dist(k));
      RngStream rng(StreamKey(11, std::string(to_string(k)) + std::string(to_string(tag))));
      for (int i = 0; i < 10000; ++i) {
        const auto [x, y] = sample_pair(k, s, rng);
        const double d = distance(x, y);
        ASSERT_GE(d, s.min_dist);
        ASSERT_LE(d, s.epsilon);
        ASSERT_GT(d, 0.0);
      }
    }
  }
}

TEST(Sampling, S3AcceptanceMatchesGridOracle) {
  // Ellipse space, eps = pi/2. The theta gap is uniform on [0, pi/2] and each
  // translation difference has the triangular density (2 - |a|)/4 on [-2, 2].
  // Integrate the last coordinate in closed form, the others on a midpoint grid.
  const double eps = kPi / 2;
  const int n = 2000;
  double oracle = 0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * (kPi / 2) / n;
    for (int j = 0; j < n; ++j) {
      const double a = -2 + (j + 0.5) * 4.0 / n;
      const double r2 = eps * eps - t * t - a * a;
      if (r2 <= 0) continue;
      const double b = std::min(std::sqrt(r2), 2.0);
      oracle += (2.0 / kPi) * ((2 - std::abs(a)) / 4) * (b - b * b / 4) * ((kPi / 2) / n) * (4.0 / n);
    }
  }
  RngStream rng(StreamKey(12, "s3-accept"));
  const int trials = 200000;
  int accepted = 0;
  for (int i = 0; i < trials; ++i) {
    const auto x = sample_uniform(ManifoldKind::EllipseSpace, rng);
    const auto y = sample_uniform(ManifoldKind::EllipseSpace, rng);
    accepted += distance(x, y) < eps;
  }
  EXPECT_NEAR(accepted / double(trials), oracle, 0.02 * oracle);
}

TEST(Sampling, S2RadialLawOnFlatKinds) {
  for (ManifoldKind k : {ManifoldKind::KleinBottle, ManifoldKind::EllipseSpace}) {
    const int m = intrinsic_dim(k);
    const double a = 0.02, e = 0.3;
    const auto s = strategy(StrategyTag::S2, e, a);
    RngStream rng(StreamKey(13, to_string(k)));
    std::vector<double> u;
    int total = 0;
    while (total < 20000) {
      const auto [x, y] = sample_pair(k, s, rng);
      // The ellipse box boundary truncates balls; keep interior x only.
      if (k == ManifoldKind::EllipseSpace && (x.coords.tail(2).array().abs() > 1 - e).any()) continue;
      const double d = distance(x, y);
      u.push_back((std::pow(d, m) - std::pow(a, m)) / (std::pow(e, m) - std::pow(a, m)));
      ++total;
    }
    EXPECT_LT(ks_statistic(u), ks_critical(u.size())) << to_string(k);
  }
}

TEST(Sampling, S3MarginalUniformOnKlein) {
  const auto s = strategy(StrategyTag::S3, 0.2, 0.01);
  RngStream rng(StreamKey(14, "klein-marginal"));
  std::vector<double> u0, u1;
  for (int i = 0; i < 20000; ++i) {
    const auto [x, y] = sample_pair(ManifoldKind::KleinBottle, s, rng);
    u0.push_back(x.coords[0]);
    u1.push_back(x.coords[1]);
  }
  EXPECT_LT(ks_statistic(u0), ks_critical(u0.size()));
  EXPECT_LT(ks_statistic(u1), ks_critical(u1.size()));
}

TEST(Sampling, MakeTripleHemisphere) {
  const ManifoldPoint e3 = make_point(ManifoldKind::Hemisphere, Eigen::Vector3d(0, 0, 1));
  const ManifoldPoint e1 = make_point(ManifoldKind::Hemisphere, Eigen::Vector3d(1, 0, 0));
  const SampleTriple t = make_triple(e3, e1);
  EXPECT_LE((t.mid.coords - Eigen::Vector3d(1, 0, 1) / std::sqrt(2.0)).norm(), 1e-15);
  EXPECT_NEAR(t.dist, kPi / 2, 1e-15);
  EXPECT_FALSE(t.has_payload());
}

TEST(Sampling, MakeTripleWithRenderer) {
  const Renderer r = default_renderer(ManifoldKind::EllipseSpace, 12);
  RngStream rng(StreamKey(15, "payload"));
  const auto tr = sample_triples(ManifoldKind::EllipseSpace, strategy(StrategyTag::S1, 0.5, 0.0), 3, rng, &r);
  for (const auto& t : tr) {
    ASSERT_TRUE(t.has_payload());
    EXPECT_EQ(t.image_x->width, 12);
    EXPECT_EQ(t.image_mid->height, 12);
    EXPECT_EQ(t.input_y().size(), 144);
  }
}

TEST(Sampling, DensityLimitValues) {
  const auto s = strategy(StrategyTag::S1, 0.2, 0.0);
  EXPECT_NEAR(density_limit(ManifoldKind::KleinBottle, s).value, 1 / kPi, 1e-15);
  EXPECT_NEAR(density_limit(ManifoldKind::Hemisphere, s).value, 1 / (2 * kPi * kPi), 1e-15);
  const auto rho = density_limit(ManifoldKind::Rotations, s);
  EXPECT_EQ(rho(make_point(ManifoldKind::Rotations, Eigen::Vector4d(1, 0, 0, 0)), Eigen::Vector3d(0.1, 0, 0)),
            rho(make_point(ManifoldKind::Rotations, Eigen::Vector4d(0, 1, 0, 0)), Eigen::Vector3d(0, 0.5, 0.2)));
}

TEST(Sampling, AnnulusDensityIntegratesToBallMass) {
  auto s = strategy(StrategyTag::S1, 0.2, 0.1);
  const auto rho = density_limit(ManifoldKind::KleinBottle, s, true);
  EXPECT_EQ(rho.inner_radius, 0.5);
  // rho * area of the annulus equals rho_ball * area of the ball.
  EXPECT_NEAR(rho.value * kPi * (1 - 0.25), 1.0, 1e-14);
}

TEST(Sampling, StarvationRaises) {
  const auto s = strategy(StrategyTag::S3, 1e-5, 0.999e-5);
  RngStream rng(StreamKey(16, "starve"));
  try {
    sample_pair(ManifoldKind::EllipseSpace, s, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SamplingStarvation);
  }
}

TEST(Sampling, Deterministic) {
  const auto s = strategy(StrategyTag::S1, 0.4, 0.01);
  RngStream a(StreamKey(17, "det")), b(StreamKey(17, "det"));
  const auto ta = sample_triples(ManifoldKind::Rotations, s, 50, a);
  const auto tb = sample_triples(ManifoldKind::Rotations, s, 50, b);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].x.coords, tb[i].x.coords);
    EXPECT_EQ(ta[i].y.coords, tb[i].y.coords);
  }
}

TEST(Sampling, TripleFileRoundTrip) {
  const auto s = strategy(StrategyTag::S2, 0.3, 0.0);
  RngStream rng(StreamKey(18, "io"));
  const auto tr = sample_triples(ManifoldKind::EllipseSpace, s, 40, rng);
  const auto path = std::filesystem::temp_directory_path() / "lowbend_triples_roundtrip.txt";
  write_triples(path, ManifoldKind::EllipseSpace, tr);
  const TripleTable back = read_triples(path);
  ASSERT_EQ(back.kind, ManifoldKind::EllipseSpace);
  ASSERT_EQ(back.triples.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(back.triples[i].x.coords, tr[i].x.coords);
    EXPECT_EQ(back.triples[i].mid.coords, tr[i].mid.coords);
    EXPECT_EQ(back.triples[i].dist, tr[i].dist);
  }
  std::filesystem::remove(path);
}
