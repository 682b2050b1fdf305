#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lowbend/render.hpp"
#include "lowbend/sampling.hpp"

namespace lowbend {

/// Which image renderer produces payloads, and its parameters.
struct RendererConfig {
  std::string name = "none";  // none | sundial | ellipse | splat
  int resolution = 16;
  EllipseMode ellipse_mode = EllipseMode::Binary;
  double ellipse_k = 20.0;
  SundialSpec sundial;
  SplatSpec splat;

  bool enabled() const { return name != "none"; }
  /// Throws KindMismatch if the renderer does not fit the manifold kind.
  void validate(ManifoldKind kind) const;
  /// Image shape (width, height, channels) of one payload.
  int channels() const;
  int input_dim(ManifoldKind kind) const;
  /// key=value description for manifests.
  std::map<std::string, std::string> describe() const;
};

Renderer make_renderer(const RendererConfig& cfg);

/// Points with x3 below this are not rendered by the sundial dataset.
inline const double kSundialCollar = std::sin(0.01);

/// Whether a point can be rendered (sundial boundary collar excluded).
bool renderable(const RendererConfig& cfg, const ManifoldPoint& p);

/// Samples `count` triples whose three points are all renderable and
/// attaches payloads. Rendering runs in parallel; sampling is sequential so
/// the result depends only on the stream.
std::vector<SampleTriple> sample_rendered_triples(ManifoldKind kind,
                                                  const SamplingStrategy& strategy,
                                                  std::size_t count, RngStream& rng,
                                                  const RendererConfig& cfg);

struct DatasetSpec {
  ManifoldKind kind = ManifoldKind::Hemisphere;
  SamplingStrategy strategy;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  RendererConfig renderer;
};

// Directory layout:
//   manifest.txt  key=value lines (kind, strategy, epsilon, min_dist, seed,
//                 count, renderer.*, image shape, field order)
//   triples.txt   triple table (see write_triples)
//   payloads.bin  per record the x, y, mid images as little-endian f64,
//                 row-major pixels with interleaved channels
void build_dataset(const std::filesystem::path& dir, const DatasetSpec& spec);

struct Dataset {
  std::map<std::string, std::string> manifest;
  ManifoldKind kind = ManifoldKind::Hemisphere;
  std::vector<SampleTriple> triples;
};

Dataset load_dataset(const std::filesystem::path& dir);

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

}  // namespace lowbend
