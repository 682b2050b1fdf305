#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lowbend/geometry.hpp"

using namespace lowbend;

namespace {

constexpr double kPi = std::numbers::pi;

ManifoldPoint pt(ManifoldKind k, std::initializer_list<double> c) {
  Eigen::VectorXd v(c.size());
  std::size_t i = 0;
  for (double x : c) v[i++] = x;
  return make_point(k, v);
}

// Klein bottle distance by brute force over a wide block of copies.
double klein_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double best = 1e9;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      const double u = y[0] + a;
      const double v = (a % 2 == 0 ? y[1] : 1.0 - y[1]) + b;
      best = std::min(best, std::hypot(u - x[0], v - x[1]));
    }
  return best;
}

// Pair at distance below `r` from x, built by a random exp step.
ManifoldPoint near(const ManifoldPoint& x, double r, RngStream& rng) {
  for (;;) {
    const int m = intrinsic_dim(x.kind);
    Eigen::VectorXd w(m);
    for (int i = 0; i < m; ++i) w[i] = rng.normal();
    w *= rng.uniform(0.0, r) / w.norm();
    try {
      return normal_coords(x, w);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST(Geometry, KindConstants) {
  EXPECT_EQ(intrinsic_dim(ManifoldKind::Hemisphere), 2);
  EXPECT_EQ(intrinsic_dim(ManifoldKind::Rotations), 3);
  EXPECT_EQ(intrinsic_dim(ManifoldKind::KleinBottle), 2);
  EXPECT_EQ(intrinsic_dim(ManifoldKind::EllipseSpace), 3);
  EXPECT_DOUBLE_EQ(diameter(ManifoldKind::Hemisphere), kPi);
  EXPECT_DOUBLE_EQ(diameter(ManifoldKind::Rotations), kPi / 2);
  EXPECT_DOUBLE_EQ(diameter(ManifoldKind::KleinBottle), 1 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(diameter(ManifoldKind::EllipseSpace), std::sqrt(kPi * kPi / 4 + 8));
  for (ManifoldKind k : kAllKinds) EXPECT_EQ(kind_from_string(to_string(k)), k);
}

TEST(Geometry, DistanceExamples) {
  EXPECT_NEAR(distance(pt(ManifoldKind::Hemisphere, {0, 0, 1}), pt(ManifoldKind::Hemisphere, {1, 0, 0})),
              kPi / 2, 1e-15);
  const double h = std::sqrt(2.0) / 2;
  const auto q1 = pt(ManifoldKind::Rotations, {1, 0, 0, 0});
  const auto q2 = pt(ManifoldKind::Rotations, {h, h, 0, 0});
  EXPECT_NEAR(distance(q1, q2), std::acos(std::abs(q1.coords.dot(q2.coords))), 1e-15);
  EXPECT_NEAR(distance(q1, q2), kPi / 4, 1e-15);

  const auto k1 = pt(ManifoldKind::KleinBottle, {0.1, 0.5});
  const auto k2 = pt(ManifoldKind::KleinBottle, {0.9, 0.5});
  EXPECT_NEAR(distance(k1, k2), klein_oracle(k1.coords, k2.coords), 1e-15);
  EXPECT_NEAR(distance(k1, k2), 0.2, 1e-15);

  const auto e1 = pt(ManifoldKind::EllipseSpace, {0, 0, 0});
  const auto e2 = pt(ManifoldKind::EllipseSpace, {kPi - 0.2, 0, 0});
  const double dt = kPi - 0.2;
  EXPECT_NEAR(distance(e1, e2), std::min({dt, std::abs(dt - kPi), std::abs(dt + kPi)}), 1e-15);
  EXPECT_NEAR(distance(e1, e2), 0.2, 1e-14);
}

TEST(Geometry, MixedKindsThrow) {
  const auto a = pt(ManifoldKind::KleinBottle, {0.1, 0.5});
  const auto b = pt(ManifoldKind::EllipseSpace, {0.1, 0.5, 0});
  try {
    distance(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KindMismatch);
  }
}

TEST(Geometry, MeanExamples) {
  RngStream rng(StreamKey(1, "mean-self"));
  for (ManifoldKind k : kAllKinds) {
    const auto x = sample_uniform(k, rng);
    EXPECT_LE((mean(x, x).coords - x.coords).norm(), 1e-15) << to_string(k);
  }
  const auto m = mean(pt(ManifoldKind::Hemisphere, {1, 0, 0}), pt(ManifoldKind::Hemisphere, {0, 1, 0}));
  EXPECT_LE((m.coords - Eigen::Vector3d(1, 1, 0) / std::sqrt(2.0)).norm(), 1e-15);

  const auto km = mean(pt(ManifoldKind::KleinBottle, {0.1, 0.5}), pt(ManifoldKind::KleinBottle, {0.9, 0.5}));
  EXPECT_NEAR(km.coords[0], 0.0, 1e-15);
  EXPECT_NEAR(km.coords[1], 0.5, 1e-15);
}

TEST(Geometry, DegenerateMidpointThrows) {
  const auto a = pt(ManifoldKind::Hemisphere, {1, 0, 0});
  const auto b = pt(ManifoldKind::Hemisphere, {-1, 0, 0});
  try {
    mean(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegeneratePair);
  }
}

TEST(Geometry, ExpLogExamples) {
  RngStream rng(StreamKey(2, "exp-zero"));
  for (ManifoldKind k : kAllKinds) {
    const auto x = sample_uniform(k, rng);
    EXPECT_LE((exp_map(x, Eigen::VectorXd(Eigen::VectorXd::Zero(chart_dim(k)))).coords - x.coords).norm(), 1e-15);
  }
  const auto e3 = pt(ManifoldKind::Hemisphere, {0, 0, 1});
  const Eigen::Vector3d v(kPi / 2, 0, 0);
  const Eigen::Vector3d oracle = std::cos(v.norm()) * Eigen::Vector3d(0, 0, 1) + std::sin(v.norm()) * v.normalized();
  const auto y = exp_map(e3, Eigen::VectorXd(v));
  EXPECT_LE((y.coords - oracle).norm(), 1e-15);
  EXPECT_LE((y.coords - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
}

TEST(Geometry, RotationsLogExpRoundTrip) {
  RngStream rng(StreamKey(3, "rot-roundtrip"));
  for (int i = 0; i < 10000; ++i) {
    const auto q = sample_uniform(ManifoldKind::Rotations, rng);
    Eigen::Vector3d w(rng.normal(), rng.normal(), rng.normal());
    w *= rng.uniform(0.0, 1.0) / w.norm();
    const Eigen::VectorXd v = tangent_frame(q) * w;
    const auto back = log_map(q, exp_map(q, v)).vec;
    ASSERT_LE((back - v).norm(), 1e-9);
  }
}

TEST(Geometry, NeighborhoodExamples) {
  RngStream rng(StreamKey(4, "nbhd"));
  for (ManifoldKind k : kAllKinds) {
    const auto x = sample_uniform(k, rng);
    EXPECT_TRUE(in_neighborhood(x, x, 1e-6));
  }
  EXPECT_FALSE(in_neighborhood(pt(ManifoldKind::Hemisphere, {0, 0, 1}), pt(ManifoldKind::Hemisphere, {1, 0, 0}),
                               kPi / 4));
  EXPECT_TRUE(in_neighborhood(pt(ManifoldKind::KleinBottle, {0.1, 0.5}), pt(ManifoldKind::KleinBottle, {0.9, 0.5}),
                              0.25));
}

TEST(Geometry, SymmetryAndTriangle) {
  for (ManifoldKind k : kAllKinds) {
    RngStream rng(StreamKey(5, to_string(k)));
    for (int i = 0; i < 10000; ++i) {
      const auto x = sample_uniform(k, rng);
      const auto y = sample_uniform(k, rng);
      const auto z = sample_uniform(k, rng);
      ASSERT_EQ(distance(x, y), distance(y, x)) << to_string(k);
      ASSERT_LE(distance(x, z), distance(x, y) + distance(y, z) + 1e-9) << to_string(k);
    }
  }
}

TEST(Geometry, KleinDistanceMatchesOracle) {
  RngStream rng(StreamKey(6, "klein-oracle"));
  for (int i = 0; i < 10000; ++i) {
    const auto x = sample_uniform(ManifoldKind::KleinBottle, rng);
    const auto y = sample_uniform(ManifoldKind::KleinBottle, rng);
    ASSERT_NEAR(distance(x, y), klein_oracle(x.coords, y.coords), 1e-14);
  }
}

TEST(Geometry, MidpointAndRoundTrip) {
  for (ManifoldKind k : kAllKinds) {
    RngStream rng(StreamKey(7, to_string(k)));
    const double r = 0.9 * injectivity_bound(k);
    for (int i = 0; i < 10000; ++i) {
      const auto x = sample_uniform(k, rng);
      const auto y = near(x, r, rng);
      const double d = distance(x, y);
      const auto m = mean(x, y);
      ASSERT_NEAR(distance(x, m), d / 2, 1e-9) << to_string(k);
      ASSERT_NEAR(distance(y, m), d / 2, 1e-9) << to_string(k);
      const auto v = log_map(x, y);
      ASSERT_NEAR(v.vec.norm(), d, 1e-9) << to_string(k);
      ASSERT_LE(distance(exp_map(x, v), y), 1e-9) << to_string(k);
    }
  }
}

TEST(Geometry, KleinGlueing) {
  for (int i = 0; i <= 20; ++i) {
    const double s = i / 20.0;
    const Eigen::Vector2d a(s, 0), b(s, 1), c(0, s), d(1, 1 - s);
    EXPECT_NEAR(distance(make_point(ManifoldKind::KleinBottle, a), make_point(ManifoldKind::KleinBottle, b)), 0.0,
                1e-15);
    EXPECT_NEAR(distance(make_point(ManifoldKind::KleinBottle, c), make_point(ManifoldKind::KleinBottle, d)), 0.0,
                1e-15);
  }
}

TEST(Geometry, UniformMoments) {
  const int n = 1000000;
  RngStream rng(StreamKey(8, "hemi-moment"));
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = sample_uniform(ManifoldKind::Hemisphere, rng).coords[2];
    s += z;
    s2 += z * z;
  }
  // x3 is uniform on [0,1] under the area measure: mean 1/2, variance 1/12.
  EXPECT_NEAR(s / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));

  RngStream rr(StreamKey(8, "rot-moment"));
  const Eigen::Vector4d fixed = Eigen::Vector4d(1, 2, -1, 0.5).normalized();
  double t = 0;
  const int nr = 200000;
  for (int i = 0; i < nr; ++i) {
    const double c = sample_uniform(ManifoldKind::Rotations, rr).coords.dot(fixed);
    t += c * c;
  }
  // On S^3, c^2 ~ Beta(1/2, 3/2): mean 1/4, variance 3/80.
  EXPECT_NEAR(t / nr, 0.25, 3 * std::sqrt(3.0 / 80 / nr));
}

namespace {

// Two-sided KS statistic against U(0,1); critical value at alpha = 0.01.
bool ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d < 1.628 / std::sqrt(n);
}

}  // namespace

TEST(Geometry, FlatKindsUniformKs) {
  RngStream rng(StreamKey(9, "ks"));
  std::vector<std::vector<double>> cols(5);
  for (int i = 0; i < 20000; ++i) {
    const auto k = sample_uniform(ManifoldKind::KleinBottle, rng);
    cols[0].push_back(k.coords[0]);
    cols[1].push_back(k.coords[1]);
    const auto e = sample_uniform(ManifoldKind::EllipseSpace, rng);
    cols[2].push_back(e.coords[0] / kPi);
    cols[3].push_back((e.coords[1] + 1) / 2);
    cols[4].push_back((e.coords[2] + 1) / 2);
  }
  for (auto& c : cols) EXPECT_TRUE(ks_uniform(c));
}

TEST(Geometry, MakePointValidates) {
  EXPECT_THROW(make_point(ManifoldKind::Hemisphere, Eigen::Vector3d(0, 0, 2)), Error);
  EXPECT_THROW(make_point(ManifoldKind::Hemisphere, Eigen::Vector2d(0, 1)), Error);
  const auto q = make_point(ManifoldKind::Rotations, Eigen::Vector4d(-1, 0, 0, 0));
  EXPECT_EQ(q.coords[0], 1.0);
}

TEST(Geometry, VolumeFactorFlatIsOne) {
  EXPECT_EQ(volume_factor(ManifoldKind::KleinBottle, 0.3), 1.0);
  EXPECT_NEAR(volume_factor(ManifoldKind::Hemisphere, 0.1), std::sin(0.1) / 0.1, 1e-16);
}
