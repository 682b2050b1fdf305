#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lowbend/geometry.hpp"
#include "lowbend/image.hpp"
#include "lowbend/random.hpp"

namespace lowbend {

enum class StrategyTag {
  S1,  // x uniform, y uniform w.r.t. V_g in D_eps(x)
  S2,  // x uniform, v uniform in the tangent eps-ball, y = exp_x(v)
  S3,  // (x, y) uniform on M x M, rejected unless y in D_eps(x)
};

std::string_view to_string(StrategyTag tag);
StrategyTag strategy_from_string(std::string_view name);

struct SamplingStrategy {
  StrategyTag tag = StrategyTag::S3;
  double epsilon = 0.0;
  double min_dist = 0.0;
  /// Optional chart patch for flat kinds; both points must lie inside it.
  std::optional<ChartWindow> window;

  /// Throws InvalidArgument unless 0 <= min_dist < epsilon <= injectivity bound.
  void validate(ManifoldKind kind) const;
};

/// Rejection floors used in the reference experiments: 0.01*pi on the
/// hemisphere, a twentieth of the maximal distance for rotations and the
/// Klein bottle, none for ellipses.
double default_min_dist(ManifoldKind kind);

inline constexpr std::size_t kMaxRejections = 1'000'000;

struct SampleTriple {
  ManifoldPoint x;
  ManifoldPoint y;
  ManifoldPoint mid;
  double dist = 0.0;
  std::optional<ImageGrid> image_x;
  std::optional<ImageGrid> image_y;
  std::optional<ImageGrid> image_mid;

  bool has_payload() const { return image_x.has_value(); }
  /// Network input for each slot: the rendered image when present, chart
  /// coordinates otherwise.
  const Eigen::VectorXd& input_x() const { return image_x ? image_x->values : x.coords; }
  const Eigen::VectorXd& input_y() const { return image_y ? image_y->values : y.coords; }
  const Eigen::VectorXd& input_mid() const {
    return image_mid ? image_mid->values : mid.coords;
  }
};

/// Uniform draw from M, restricted to the window when one is set.
ManifoldPoint sample_in_domain(ManifoldKind kind, const std::optional<ChartWindow>& window,
                               RngStream& rng);

std::pair<ManifoldPoint, ManifoldPoint> sample_pair(ManifoldKind kind,
                                                    const SamplingStrategy& strategy,
                                                    RngStream& rng);

SampleTriple make_triple(const ManifoldPoint& x, const ManifoldPoint& y,
                         const Renderer* renderer = nullptr);

std::vector<SampleTriple> sample_triples(ManifoldKind kind, const SamplingStrategy& strategy,
                                         std::size_t count, RngStream& rng,
                                         const Renderer* renderer = nullptr);

/// Pointwise limit rho(x, w) of eps^m times the pair density. Constant
/// 1 / (V_g(M) |B_1|) for every built-in strategy; the annulus variant
/// (rejection floor scaling with eps) vanishes for |w| < min_dist/eps and is
/// rescaled by the ball/annulus volume ratio.
struct DensityLimit {
  double value = 0.0;
  double inner_radius = 0.0;
  int dim = 0;

  double operator()(const ManifoldPoint& /*x*/, const Eigen::VectorXd& w) const {
    return w.norm() < inner_radius ? 0.0 : value;
  }
  double operator()(double radius) const { return radius < inner_radius ? 0.0 : value; }
};

DensityLimit density_limit(ManifoldKind kind, const SamplingStrategy& strategy,
                           bool annulus = false);

// Triple table: a header line naming the fields, one whitespace-separated
// record per line, coordinates printed with 17 significant digits. The
// `payload` column holds the record's index into the payload blob, or -1.
struct TripleTable {
  ManifoldKind kind = ManifoldKind::Hemisphere;
  std::vector<SampleTriple> triples;
};

std::string triple_header(ManifoldKind kind);
void write_triples(const std::filesystem::path& path, ManifoldKind kind,
                   std::span<const SampleTriple> triples);
/// Payload blobs are not read here; see datasets::load_dataset.
TripleTable read_triples(const std::filesystem::path& path);

}  // namespace lowbend
