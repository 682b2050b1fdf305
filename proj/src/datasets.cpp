#include "lowbend/datasets.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lowbend/csv.hpp"
#include "lowbend/error.hpp"
#include "lowbend/parallel.hpp"

namespace lowbend {

void RendererConfig::validate(ManifoldKind kind) const {
  if (name == "none") return;
  const bool ok = (name == "sundial" && kind == ManifoldKind::Hemisphere) ||
                  (name == "ellipse" && kind == ManifoldKind::EllipseSpace) ||
                  (name == "splat" && kind == ManifoldKind::Rotations);
  if (!ok)
    throw Error(ErrorCode::KindMismatch,
                "renderer '" + name + "' does not apply to " + std::string(to_string(kind)));
  if (resolution < 8) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 8");
}

int RendererConfig::channels() const { return name == "splat" ? 3 : 1; }

int RendererConfig::input_dim(ManifoldKind kind) const {
  if (!enabled()) return chart_dim(kind);
  return resolution * resolution * channels();
}

std::map<std::string, std::string> RendererConfig::describe() const {
  std::map<std::string, std::string> kv;
  kv["renderer"] = name;
  if (!enabled()) return kv;
  kv["renderer.resolution"] = std::to_string(resolution);
  if (name == "ellipse") {
    kv["renderer.mode"] = ellipse_mode == EllipseMode::Binary ? "binary" : "smooth";
    kv["renderer.k"] = format_double(ellipse_k);
    kv["renderer.window"] = "[-1,1]^2";
  } else if (name == "sundial") {
    kv["renderer.rod_height"] = format_double(sundial.rod_height);
    kv["renderer.half_width"] = format_double(sundial.half_width);
    kv["renderer.sigma_orth"] = format_double(sundial.sigma_orth);
    kv["renderer.collar"] = format_double(kSundialCollar);
  } else if (name == "splat") {
    kv["renderer.splat_radius"] = format_double(splat.splat_radius);
    kv["renderer.opacity"] = format_double(splat.opacity);
    kv["renderer.half_width"] = format_double(splat.half_width);
    kv["renderer.cloud_points"] = std::to_string(splat_cloud().size());
  }
  return kv;
}

Renderer make_renderer(const RendererConfig& cfg) {
  if (cfg.name == "sundial") {
    SundialSpec s = cfg.sundial;
    s.resolution = cfg.resolution;
    return [s](const ManifoldPoint& p) { return render_sundial(p, s); };
  }
  if (cfg.name == "ellipse") {
    EllipseSpec s{cfg.resolution, cfg.ellipse_mode, cfg.ellipse_k};
    return [s](const ManifoldPoint& p) { return render_ellipse(p, s); };
  }
  if (cfg.name == "splat") {
    SplatSpec s = cfg.splat;
    s.resolution = cfg.resolution;
    return [s](const ManifoldPoint& p) { return render_splat(p, s); };
  }
  if (cfg.name == "none") return {};
  throw Error(ErrorCode::InvalidArgument, "unknown renderer '" + cfg.name + "'");
}

bool renderable(const RendererConfig& cfg, const ManifoldPoint& p) {
  if (cfg.name == "sundial") return p.coords[2] >= kSundialCollar;
  return true;
}

std::vector<SampleTriple> sample_rendered_triples(ManifoldKind kind,
                                                  const SamplingStrategy& strategy,
                                                  std::size_t count, RngStream& rng,
                                                  const RendererConfig& cfg) {
  cfg.validate(kind);
  std::vector<SampleTriple> out;
  out.reserve(count);
  std::size_t rejected = 0;
  while (out.size() < count) {
    auto [x, y] = sample_pair(kind, strategy, rng);
    SampleTriple t = make_triple(x, y);
    if (!renderable(cfg, t.x) || !renderable(cfg, t.y) || !renderable(cfg, t.mid)) {
      if (++rejected > kMaxRejections)
        throw Error(ErrorCode::SamplingStarvation, "renderable region too small");
      continue;
    }
    out.push_back(std::move(t));
  }
  if (cfg.enabled()) {
    const Renderer render = make_renderer(cfg);
    parallel_for(out.size(), [&](std::size_t i) {
      SampleTriple& t = out[i];
      t.image_x = render(t.x);
      t.image_y = render(t.y);
      t.image_mid = render(t.mid);
    });
  }
  return out;
}

namespace {

void write_manifest(const std::filesystem::path& path,
                    const std::map<std::string, std::string>& kv) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Io, "malformed line in " + path.string());
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void build_dataset(const std::filesystem::path& dir, const DatasetSpec& spec) {
  spec.strategy.validate(spec.kind);
  spec.renderer.validate(spec.kind);
  std::filesystem::create_directories(dir);
  RngStream rng(StreamKey(spec.seed, "dataset"));
  const std::vector<SampleTriple> triples =
      sample_rendered_triples(spec.kind, spec.strategy, spec.count, rng, spec.renderer);

  std::map<std::string, std::string> kv = spec.renderer.describe();
  kv["format"] = "lowbend-dataset v1";
  kv["kind"] = std::string(to_string(spec.kind));
  kv["strategy"] = std::string(to_string(spec.strategy.tag));
  kv["epsilon"] = format_double(spec.strategy.epsilon);
  kv["min_dist"] = format_double(spec.strategy.min_dist);
  kv["seed"] = std::to_string(spec.seed);
  kv["count"] = std::to_string(spec.count);
  kv["triples.fields"] = triple_header(spec.kind);
  if (spec.renderer.enabled()) {
    kv["image.width"] = std::to_string(spec.renderer.resolution);
    kv["image.height"] = std::to_string(spec.renderer.resolution);
    kv["image.channels"] = std::to_string(spec.renderer.channels());
    kv["payloads.layout"] = "record-major x,y,mid; f64 little-endian; row-major, channels interleaved";
  }
  write_manifest(dir / "manifest.txt", kv);
  write_triples(dir / "triples.txt", spec.kind, triples);

  std::ofstream blob(dir / "payloads.bin", std::ios::binary);
  if (!blob) throw Error(ErrorCode::Io, "cannot write payloads in " + dir.string());
  for (const SampleTriple& t : triples) {
    if (!t.has_payload()) continue;
    for (const ImageGrid* img : {&*t.image_x, &*t.image_y, &*t.image_mid})
      blob.write(reinterpret_cast<const char*>(img->values.data()),
                 static_cast<std::streamsize>(img->values.size() * sizeof(double)));
  }
  if (!blob) throw Error(ErrorCode::Io, "payload write failed in " + dir.string());
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.manifest = read_key_values(dir / "manifest.txt");
  TripleTable table = read_triples(dir / "triples.txt");
  ds.kind = table.kind;
  ds.triples = std::move(table.triples);
  if (ds.manifest.count("kind") && ds.manifest.at("kind") != to_string(ds.kind))
    throw Error(ErrorCode::Io, "manifest kind differs from triple table");
  if (ds.manifest.count("image.width")) {
    const int w = std::stoi(ds.manifest.at("image.width"));
    const int h = std::stoi(ds.manifest.at("image.height"));
    const int c = std::stoi(ds.manifest.at("image.channels"));
    std::ifstream blob(dir / "payloads.bin", std::ios::binary);
    if (!blob) throw Error(ErrorCode::Io, "missing payloads in " + dir.string());
    for (SampleTriple& t : ds.triples)
      for (auto* slot : {&t.image_x, &t.image_y, &t.image_mid}) {
        ImageGrid img(w, h, c);
        blob.read(reinterpret_cast<char*>(img.values.data()),
                  static_cast<std::streamsize>(img.values.size() * sizeof(double)));
        if (!blob) throw Error(ErrorCode::Io, "truncated payload file in " + dir.string());
        *slot = std::move(img);
      }
  }
  return ds;
}

}  // namespace lowbend
