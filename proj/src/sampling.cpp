#include "lowbend/sampling.hpp"

#include <cmath>
#include <string>

namespace lowbend {

std::string_view to_string(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::S1: return "S1";
    case StrategyTag::S2: return "S2";
    case StrategyTag::S3: return "S3";
  }
  return "?";
}

StrategyTag strategy_from_string(std::string_view name) {
  if (name == "S1") return StrategyTag::S1;
  if (name == "S2") return StrategyTag::S2;
  if (name == "S3") return StrategyTag::S3;
  throw Error(ErrorCode::InvalidArgument, "unknown sampling strategy '" + std::string(name) + "'");
}

void SamplingStrategy::validate(ManifoldKind kind) const {
  if (!(min_dist >= 0.0) || !(epsilon > min_dist))
    throw Error(ErrorCode::InvalidArgument, "sampling requires 0 <= min_dist < epsilon");
  if (epsilon > injectivity_bound(kind))
    throw Error(ErrorCode::InvalidArgument,
                "sampling radius exceeds the injectivity bound of " + std::string(to_string(kind)));
  if (window) {
    if (window->lo.size() != chart_dim(kind) || window->hi.size() != chart_dim(kind))
      throw Error(ErrorCode::ShapeMismatch, "window dimension does not match chart");
    if (!(window->hi.array() > window->lo.array()).all())
      throw Error(ErrorCode::InvalidArgument, "empty sampling window");
  }
}

double default_min_dist(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Hemisphere: return 0.01 * std::numbers::pi;
    case ManifoldKind::Rotations:
    case ManifoldKind::KleinBottle: return diameter(kind) / 20.0;
    case ManifoldKind::EllipseSpace: return 0.0;
  }
  return 0.0;
}

namespace {

Eigen::VectorXd uniform_in_ball(int m, double radius, RngStream& rng) {
  Eigen::VectorXd dir(m);
  double n = 0.0;
  do {
    for (int i = 0; i < m; ++i) dir[i] = rng.normal();
    n = dir.norm();
  } while (n < 1e-12);
  const double r = radius * std::pow(rng.uniform(), 1.0 / m);
  return (r / n) * dir;
}

/// exp_x(v) if the geodesic stays in the manifold (and window), else nothing.
std::optional<ManifoldPoint> admissible_exp(const ManifoldPoint& x, const Eigen::VectorXd& w,
                                            const std::optional<ChartWindow>& window) {
  const Eigen::VectorXd v = tangent_frame(x) * w;
  Eigen::VectorXd y = exp_map_extended(x, v);
  if (x.kind == ManifoldKind::Hemisphere && y[2] < 0.0) return std::nullopt;
  if (x.kind == ManifoldKind::EllipseSpace && (std::abs(y[1]) > 1.0 || std::abs(y[2]) > 1.0))
    return std::nullopt;
  ManifoldPoint p{x.kind, canonical_coords(x.kind, y)};
  if (window && !window->contains(p.coords)) return std::nullopt;
  return p;
}

[[noreturn]] void starve(const SamplingStrategy& s) {
  throw Error(ErrorCode::SamplingStarvation,
              "rejection sampling exceeded " + std::to_string(kMaxRejections) +
                  " iterations (epsilon=" + std::to_string(s.epsilon) +
                  ", min_dist=" + std::to_string(s.min_dist) + ")");
}

}  // namespace

ManifoldPoint sample_in_domain(ManifoldKind kind, const std::optional<ChartWindow>& window,
                               RngStream& rng) {
  if (!window) return sample_uniform<double>(kind, rng);
  if (is_flat(kind)) {
    Eigen::VectorXd c(window->lo.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.uniform(window->lo[i], window->hi[i]);
    return ManifoldPoint{kind, canonical_coords(kind, c)};
  }
  for (std::size_t it = 0; it < kMaxRejections; ++it) {
    ManifoldPoint p = sample_uniform<double>(kind, rng);
    if (window->contains(p.coords)) return p;
  }
  throw Error(ErrorCode::SamplingStarvation, "window has negligible volume");
}

std::pair<ManifoldPoint, ManifoldPoint> sample_pair(ManifoldKind kind,
                                                    const SamplingStrategy& strategy,
                                                    RngStream& rng) {
  strategy.validate(kind);
  const int m = intrinsic_dim(kind);
  const double eps = strategy.epsilon;

  if (strategy.tag == StrategyTag::S3) {
    for (std::size_t it = 0; it < kMaxRejections; ++it) {
      ManifoldPoint x = sample_in_domain(kind, strategy.window, rng);
      ManifoldPoint y = sample_in_domain(kind, strategy.window, rng);
      const double d = distance(x, y);
      if (d < eps && d >= strategy.min_dist && d > 0.0) return {std::move(x), std::move(y)};
    }
    starve(strategy);
  }

  // S1 and S2 keep x fixed so that its marginal stays uniform.
  ManifoldPoint x = sample_in_domain(kind, strategy.window, rng);
  for (std::size_t it = 0; it < kMaxRejections; ++it) {
    const Eigen::VectorXd w = uniform_in_ball(m, eps, rng);
    if (strategy.tag == StrategyTag::S1) {
      // Reweight the tangent-uniform proposal by the volume element so y is
      // uniform with respect to V_g; the factor never exceeds one.
      if (rng.uniform() >= volume_factor(kind, w.norm())) continue;
    }
    auto y = admissible_exp(x, w, strategy.window);
    if (!y) continue;
    const double d = distance(x, *y);
    if (d >= strategy.min_dist && d > 0.0 && d < eps) return {std::move(x), std::move(*y)};
  }
  starve(strategy);
}

SampleTriple make_triple(const ManifoldPoint& x, const ManifoldPoint& y,
                         const Renderer* renderer) {
  SampleTriple t;
  t.x = x;
  t.y = y;
  t.mid = mean(x, y);
  t.dist = distance(x, y);
  if (renderer && *renderer) {
    t.image_x = (*renderer)(x);
    t.image_y = (*renderer)(y);
    t.image_mid = (*renderer)(t.mid);
  }
  return t;
}

std::vector<SampleTriple> sample_triples(ManifoldKind kind, const SamplingStrategy& strategy,
                                         std::size_t count, RngStream& rng,
                                         const Renderer* renderer) {
  std::vector<SampleTriple> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto [x, y] = sample_pair(kind, strategy, rng);
    out.push_back(make_triple(x, y, renderer));
  }
  return out;
}

DensityLimit density_limit(ManifoldKind kind, const SamplingStrategy& strategy, bool annulus) {
  const int m = intrinsic_dim(kind);
  double vol = volume(kind);
  if (strategy.window) {
    if (!is_flat(kind))
      throw Error(ErrorCode::UnsupportedKind, "windowed density limit needs a flat kind");
    vol = strategy.window->volume();
  }
  DensityLimit rho;
  rho.dim = m;
  rho.value = 1.0 / (vol * unit_ball_volume(m));
  if (annulus && strategy.min_dist > 0.0) {
    rho.inner_radius = strategy.min_dist / strategy.epsilon;
    rho.value /= 1.0 - std::pow(rho.inner_radius, m);
  }
  return rho;
}

}  // namespace lowbend
