#include "lowbend/commands.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cmath>
#include <fstream>

#include "lowbend/checkpoint.hpp"
#include "lowbend/csv.hpp"
#include "lowbend/datasets.hpp"
#include "lowbend/error.hpp"
#include "lowbend/evaluation.hpp"
#include "lowbend/limit_verify.hpp"

namespace lowbend {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void prepare_run(const ExperimentConfig& cfg, const std::string& command,
                 const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  cfg.validate();
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  write_text(out / "config.txt", print_config(cfg));
  std::string m;
  m += "command=" + command + '\n';
  m += "config_hash=" + config_hash(cfg) + '\n';
  m += "seed=" + std::to_string(cfg.train.seed) + '\n';
  m += "lowbend_version=" + std::string(kVersion) + '\n';
  m += "eigen_version=" + std::to_string(EIGEN_WORLD_VERSION) + '.' +
       std::to_string(EIGEN_MAJOR_VERSION) + '.' + std::to_string(EIGEN_MINOR_VERSION) + '\n';
  for (const auto& [k, v] : extra) m += k + '=' + v + '\n';
  write_text(out / ("run_manifest_" + command + ".txt"), m);
}

std::vector<ManifoldPoint> renderable_points(const ExperimentConfig& cfg, std::size_t n,
                                             RngStream& rng) {
  std::vector<ManifoldPoint> pts;
  pts.reserve(n);
  std::size_t rejected = 0;
  while (pts.size() < n) {
    ManifoldPoint p = sample_uniform(cfg.train.kind, rng);
    if (renderable(cfg.train.renderer, p)) {
      pts.push_back(std::move(p));
    } else if (++rejected > kMaxRejections) {
      throw Error(ErrorCode::SamplingStarvation, "no renderable points");
    }
  }
  return pts;
}

std::vector<std::pair<ManifoldPoint, ManifoldPoint>> renderable_pairs(const ExperimentConfig& cfg,
                                                                      std::size_t n,
                                                                      RngStream& rng) {
  std::vector<std::pair<ManifoldPoint, ManifoldPoint>> out;
  while (out.size() < n) {
    auto batch = uniform_pairs(cfg.train.kind, 1, rng);
    auto& [x, y] = batch[0];
    if (renderable(cfg.train.renderer, x) && renderable(cfg.train.renderer, y) &&
        renderable(cfg.train.renderer, mean(x, y)))
      out.push_back(std::move(batch[0]));
  }
  return out;
}

AnalyticEmbedding fixture_for(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Hemisphere: return hemisphere_inclusion();
    case ManifoldKind::Rotations: return rotations_veronese();
    case ManifoldKind::EllipseSpace: return ellipse_circle_lift();
    case ManifoldKind::KleinBottle: return flat_linear(kind, klein_window());
  }
  throw Error(ErrorCode::UnsupportedKind, "no fixture");
}

}  // namespace

std::string error_record(const std::string& code, const std::string& message) {
  nlohmann::json j;
  j["error"] = code;
  j["message"] = message;
  return j.dump();
}

void cmd_gen_data(const ExperimentConfig& cfg) {
  prepare_run(cfg, "gen-data");
  DatasetSpec spec;
  spec.kind = cfg.train.kind;
  spec.strategy = cfg.train.strategy;
  spec.count = cfg.data_count;
  spec.seed = cfg.train.seed;
  spec.renderer = cfg.train.renderer;
  build_dataset(fs::path(cfg.out_dir) / "data", spec);
}

void cmd_train(const ExperimentConfig& cfg) {
  prepare_run(cfg, "train");
  const TrainResult r = train(cfg.train);
  const fs::path out(cfg.out_dir);
  write_training_log(out / "training_log.csv", r.log);
  const std::size_t last = r.log.empty() ? 0 : r.log.back().epoch;
  const std::size_t epoch = cfg.train.patience > 0 ? r.best_epoch : last;
  save_checkpoint(out / "encoder.bin", r.encoder);
  save_checkpoint_meta(out / "encoder.bin", {cfg.train.seed, config_hash(cfg), epoch});
  if (r.decoder) {
    save_checkpoint(out / "decoder.bin", *r.decoder);
    save_checkpoint_meta(out / "decoder.bin", {cfg.train.seed, config_hash(cfg), epoch});
  }
  std::string summary;
  summary += "best_epoch=" + std::to_string(r.best_epoch) + '\n';
  summary += "epochs_run=" + std::to_string(last) + '\n';
  summary += "stopped_early=" + std::string(r.stopped_early ? "1" : "0") + '\n';
  summary += "initial_test_total=" + format_double(r.initial_test.total) + '\n';
  write_text(out / "training_summary.txt", summary);
}

void cmd_eval(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint) {
  prepare_run(cfg, "eval",
              {{"checkpoint", checkpoint ? checkpoint->string() : std::string("none (fresh init)")}});
  const TrainConfig& tc = cfg.train;
  EncoderNet encoder;
  std::optional<EncoderNet> decoder;
  if (checkpoint) {
    encoder = load_checkpoint(*checkpoint);
    const fs::path dec = checkpoint->parent_path() / "decoder.bin";
    if (fs::exists(dec)) decoder = load_checkpoint(dec);
  } else {
    RngStream r1(StreamKey(tc.seed, "init-encoder"));
    encoder = init_kaiming(tc.encoder_widths(), tc.activation, r1);
    RngStream r2(StreamKey(tc.seed, "init-decoder"));
    decoder = init_kaiming(tc.decoder_widths(), tc.activation, r2);
  }
  if (encoder.input_dim() != tc.input_dim())
    throw Error(ErrorCode::ShapeMismatch, "checkpoint input width does not match the config");

  const fs::path out = fs::path(cfg.out_dir) / "eval";
  fs::create_directories(out);
  const Embedding phi = as_embedding(encoder);
  const InputMap input = input_map(tc.renderer);

  if (cfg.eval.pca) {
    RngStream rng(StreamKey(tc.seed, "eval-cloud"));
    const auto pts = renderable_points(cfg, cfg.eval.points, rng);
    write_pca_csv(out / "pca_variance.csv", pca(encode_cloud(pts, phi, input)));
  }
  std::vector<std::pair<ManifoldPoint, ManifoldPoint>> pairs;
  if (cfg.eval.interpolation || cfg.eval.scatter) {
    RngStream rng(StreamKey(tc.seed, "eval-pairs"));
    pairs = renderable_pairs(cfg, cfg.eval.pairs, rng);
  }
  if (cfg.eval.interpolation && decoder) {
    std::vector<double> deltas = cfg.eval.deltas;
    if (deltas.empty())
      for (int k = 1; k <= 8; ++k) deltas.push_back(diameter(tc.kind) * k / 8.0);
    const auto rows =
        interpolation_error(tc.kind, phi, as_embedding(*decoder), input, pairs, deltas);
    write_err_csv(out / "err_by_delta.csv", rows);
  }
  if (cfg.eval.scatter)
    write_scatter_csv(out / "scatter.csv", distance_scatter(tc.kind, phi, input, pairs));
  if (cfg.eval.self_intersection) {
    EvalGrid grid = evaluation_grid(tc.kind, cfg.eval.grid);
    const LatentCloud cloud = encode_cloud(grid.points, phi, input);
    const PcaResult p = pca(cloud);
    const int k = std::min<int>(cfg.eval.projection_dims, static_cast<int>(p.components.cols()));
    const Eigen::MatrixXd proj = project_codes(cloud.codes, p.mean, p.components.leftCols(k));
    write_self_intersection_csv(out / "self_intersection.csv", grid,
                                self_intersection_field(tc.kind, grid.points, proj, grid.spacing));
  }
}

void cmd_verify(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint) {
  prepare_run(cfg, "verify");
  const TrainConfig& tc = cfg.train;
  const fs::path out = fs::path(cfg.out_dir) / "verify";
  fs::create_directories(out);
  const AnalyticEmbedding emb = fixture_for(tc.kind);
  nlohmann::json report;
  report["kind"] = std::string(to_string(tc.kind));
  report["fixture"] = emb.name;

  const TaylorReport taylor =
      verify_taylor(emb, cfg.verify.radii, cfg.verify.taylor_trials, StreamKey(tc.seed, "taylor"));
  write_taylor_csv(out / "taylor.csv", taylor);
  report["taylor"] = {{"bound_first", taylor.bound_first},
                      {"bound_second", taylor.bound_second},
                      {"max_ratio_first", taylor.max_ratio_first},
                      {"max_ratio_second", taylor.max_ratio_second},
                      {"slope_first", taylor.slope_first},
                      {"slope_second", taylor.slope_second},
                      {"bounds_hold", taylor.bounds_hold}};

  if (!is_flat(tc.kind)) {
    const VolumeReport vol = verify_volume_expansion(tc.kind, cfg.verify.epsilons);
    write_volume_csv(out / "volume.csv", vol);
    report["volume"] = {{"slope", vol.slope}};
  }

  std::vector<double> eps;
  for (double e : cfg.verify.epsilons)
    if (e > 0 && e <= injectivity_bound(tc.kind) &&
        (!emb.window || e < 0.5 * (emb.window->hi - emb.window->lo).minCoeff()))
      eps.push_back(e);
  if (eps.size() >= 2) {
    const ConvergenceReport conv = verify_epsilon_convergence(
        emb, tc.strategy.tag, eps, tc.weights, cfg.verify.samples, StreamKey(tc.seed, "epsilon"));
    write_convergence_csv(out / "convergence.csv", conv);
    report["convergence"] = {{"slope", conv.slope},
                             {"within_monotone_fit", conv.within_monotone_fit}};
  }

  SamplingStrategy mc = tc.strategy;
  if (emb.window) {
    mc.window = emb.window;
    mc.epsilon = std::min(mc.epsilon, 0.25 * (emb.window->hi - emb.window->lo).minCoeff());
    mc.min_dist = std::min(mc.min_dist, 0.5 * mc.epsilon);
  }
  const McRateReport rate =
      verify_mc_rate(emb, mc, cfg.verify.mc_sizes, tc.weights, StreamKey(tc.seed, "mc-rate"));
  write_mc_rate_csv(out / "mc_rate.csv", rate);
  report["mc_rate"] = {{"slope", rate.slope}};

  const int m = intrinsic_dim(tc.kind);
  const NormEquivalenceReport ne = verify_norm_equivalence(
      m, tc.strategy.epsilon, 0.5, 200, 20000,
      StreamKey(tc.seed, "norm-equivalence"));
  report["norm_equivalence"] = {{"c_min", ne.c_min},           {"c_max", ne.c_max},
                                {"op_c_min", ne.op_c_min},     {"op_c_max", ne.op_c_max},
                                {"exact_c_min", ne.exact_c_min}, {"exact_c_max", ne.exact_c_max},
                                {"cauchy_schwarz_holds", ne.cauchy_schwarz_holds}};

  if (checkpoint) {
    const EncoderNet net = load_checkpoint(*checkpoint);
    if (tc.renderer.enabled() || net.input_dim() != chart_dim(tc.kind))
      throw Error(ErrorCode::UnsupportedKind,
                  "limit functional of a network needs chart-coordinate inputs");
    const AnalyticEmbedding net_emb =
        embedding_from_map(tc.kind, as_embedding(net), 1e-3 * diameter(tc.kind), emb.window);
    const LossBreakdown lim = local_limit_loss(net_emb, tc.weights, tc.strategy);
    report["network_limit"] = {{"isometry", lim.isometry},
                               {"bending", lim.bending},
                               {"total", lim.total},
                               {"stderr", lim.stderr_total}};
  }
  write_text(out / "verify_report.json", report.dump(2) + "\n");
}

}  // namespace lowbend
