#include "lowbend/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lowbend/csv.hpp"
#include "lowbend/error.hpp"
#include "lowbend/parallel.hpp"

namespace lowbend {

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::EncoderOnly: return "encoder-only";
    case TrainMode::Joint: return "joint";
    case TrainMode::DecoderAfter: return "decoder-after";
  }
  return "?";
}

TrainMode train_mode_from_string(std::string_view name) {
  if (name == "encoder-only") return TrainMode::EncoderOnly;
  if (name == "joint") return TrainMode::Joint;
  if (name == "decoder-after") return TrainMode::DecoderAfter;
  throw Error(ErrorCode::InvalidArgument, "unknown training mode '" + std::string(name) + "'");
}

std::vector<int> TrainConfig::encoder_widths() const {
  std::vector<int> w{input_dim()};
  w.insert(w.end(), encoder_hidden.begin(), encoder_hidden.end());
  w.push_back(latent);
  return w;
}

std::vector<int> TrainConfig::decoder_widths() const {
  std::vector<int> w{latent};
  if (decoder_hidden.empty())
    w.insert(w.end(), encoder_hidden.rbegin(), encoder_hidden.rend());
  else
    w.insert(w.end(), decoder_hidden.begin(), decoder_hidden.end());
  w.push_back(input_dim());
  return w;
}

void TrainConfig::validate() const {
  strategy.validate(kind);
  weights.validate();
  renderer.validate(kind);
  if (latent < 1) throw Error(ErrorCode::InvalidArgument, "latent dimension must be positive");
  for (int h : encoder_hidden)
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "hidden widths must be positive");
  for (int h : decoder_hidden)
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "hidden widths must be positive");
  if (batch == 0 || epoch_size == 0)
    throw Error(ErrorCode::InvalidArgument, "epoch and batch sizes must be positive");
  if (test_size == 0) throw Error(ErrorCode::InvalidArgument, "test set must be nonempty");
  if (mode == TrainMode::Joint && !(weights.kappa_rec > 0))
    throw Error(ErrorCode::InvalidArgument, "joint training needs kappa_rec > 0");
}

Eigen::MatrixXd stack_inputs(std::span<const SampleTriple> triples) {
  const Eigen::Index b = static_cast<Eigen::Index>(triples.size());
  if (b == 0) return {};
  const Eigen::Index dim = triples[0].input_x().size();
  Eigen::MatrixXd x(dim, 3 * b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const SampleTriple& t = triples[static_cast<std::size_t>(i)];
    if (t.input_x().size() != dim || t.input_y().size() != dim || t.input_mid().size() != dim)
      throw Error(ErrorCode::ShapeMismatch, "triples disagree on input dimension");
    x.col(i) = t.input_x();
    x.col(b + i) = t.input_y();
    x.col(2 * b + i) = t.input_mid();
  }
  return x;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

// Pair terms of every column triple plus, optionally, latent cotangents
// scaled by 1/B.
LossBreakdown pair_batch(const Eigen::MatrixXd& z, std::span<const SampleTriple> triples,
                         const LossWeights& weights, Eigen::MatrixXd* cotangent) {
  const Eigen::Index b = static_cast<Eigen::Index>(triples.size());
  std::vector<double> iso(triples.size()), bend(triples.size());
  if (cotangent) cotangent->setZero(z.rows(), z.cols());
  const double inv_b = 1.0 / static_cast<double>(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double d = triples[static_cast<std::size_t>(i)].dist;
    if (cotangent) {
      const PairGradient g = pair_gradient(z.col(i), z.col(b + i), z.col(2 * b + i), d, weights);
      iso[i] = g.terms.isometry;
      bend[i] = g.terms.bending;
      cotangent->col(i) = inv_b * g.d_x;
      cotangent->col(b + i) = inv_b * g.d_y;
      cotangent->col(2 * b + i) = inv_b * g.d_mid;
    } else {
      const PairTerms t = pair_terms(z.col(i), z.col(b + i), z.col(2 * b + i), d, weights.c);
      iso[i] = t.isometry;
      bend[i] = t.bending;
    }
  }
  LossBreakdown out;
  out.isometry = mean_of(iso);
  out.bending = mean_of(bend);
  out.n_samples = triples.size();
  return out;
}

// R over the x and y columns of a stacked batch. With `dz` set, adds
// kappa * dR/dz to the latent cotangent; with `dec_grads` set, fills the
// decoder gradient of kappa * R (or of R itself when kappa is 1).
double reconstruction_batch(const EncoderNet& decoder, const Eigen::MatrixXd& z,
                            const Eigen::MatrixXd& inputs, double scale, Eigen::MatrixXd* dz,
                            NetGradients* dec_grads) {
  const Eigen::Index b = z.cols() / 3;
  const Eigen::MatrixXd zxy = z.leftCols(2 * b);
  ForwardTape tape;
  const Eigen::MatrixXd rec = forward_batch(decoder, zxy, dec_grads ? &tape : nullptr);
  const Eigen::MatrixXd diff = rec - inputs.leftCols(2 * b);
  const double n_pix = static_cast<double>(diff.rows());
  const double value = diff.squaredNorm() / (n_pix * 2.0 * static_cast<double>(b));
  if (dec_grads) {
    const Eigen::MatrixXd upstream = (scale * 2.0 / (n_pix * 2.0 * static_cast<double>(b))) * diff;
    Eigen::MatrixXd din;
    *dec_grads = backward(decoder, tape, upstream, dz ? &din : nullptr);
    if (dz) dz->leftCols(2 * b) += din;
  }
  return value;
}

void finish(LossBreakdown& l, const LossWeights& w) {
  l.total = weighted_total(l.isometry, l.bending, l.reconstruction, w);
}

std::vector<SampleTriple> draw(const TrainConfig& cfg, const StreamKey& key, std::size_t n) {
  RngStream rng(key);
  return sample_rendered_triples(cfg.kind, cfg.strategy, n, rng, cfg.renderer);
}

}  // namespace

LossBreakdown evaluate_nets(const EncoderNet& encoder, const EncoderNet* decoder,
                            std::span<const SampleTriple> triples, const LossWeights& weights) {
  if (triples.empty()) throw Error(ErrorCode::EmptySampleSet, "evaluation over no samples");
  // chunked so memory stays bounded for large test sets
  constexpr std::size_t kChunk = 2048;
  std::vector<double> iso, bend, rec;
  for (std::size_t lo = 0; lo < triples.size(); lo += kChunk) {
    const auto part = triples.subspan(lo, std::min(kChunk, triples.size() - lo));
    const Eigen::MatrixXd x = stack_inputs(part);
    const Eigen::MatrixXd z = forward_batch(encoder, x);
    const LossBreakdown p = pair_batch(z, part, weights, nullptr);
    const double w = static_cast<double>(part.size());
    iso.push_back(p.isometry * w);
    bend.push_back(p.bending * w);
    if (decoder) rec.push_back(reconstruction_batch(*decoder, z, x, 1.0, nullptr, nullptr) * w);
  }
  const double n = static_cast<double>(triples.size());
  LossBreakdown out;
  out.isometry = pairwise_sum(iso) / n;
  out.bending = pairwise_sum(bend) / n;
  out.reconstruction = decoder ? pairwise_sum(rec) / n : 0.0;
  out.n_samples = triples.size();
  LossWeights w = weights;
  if (!decoder) w.kappa_rec = 0.0;
  finish(out, w);
  return out;
}

TrainResult train(const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  {
    RngStream rng(StreamKey(cfg.seed, "init-encoder"));
    result.encoder = init_kaiming(cfg.encoder_widths(), cfg.activation, rng);
  }
  if (cfg.has_decoder()) {
    RngStream rng(StreamKey(cfg.seed, "init-decoder"));
    result.decoder = init_kaiming(cfg.decoder_widths(), cfg.activation, rng);
  }
  const std::vector<SampleTriple> test = draw(cfg, StreamKey(cfg.seed, "test"), cfg.test_size);
  const bool joint = cfg.mode == TrainMode::Joint;
  const EncoderNet* dec_for_eval = result.decoder ? &*result.decoder : nullptr;
  result.initial_test = evaluate_nets(result.encoder, dec_for_eval, test, cfg.weights);

  AdamState enc_state = AdamState::init(result.encoder, cfg.adam);
  std::optional<AdamState> dec_state;
  if (result.decoder) dec_state = AdamState::init(*result.decoder, cfg.adam);

  // Encoder-only weights for the phase objective in decoder-after mode
  // (reconstruction is reported but not optimized until phase two).
  LossWeights phase_weights = cfg.weights;
  if (!joint) phase_weights.kappa_rec = 0.0;

  const std::size_t phase2 =
      cfg.mode == TrainMode::DecoderAfter ? (cfg.decoder_epochs ? cfg.decoder_epochs : cfg.epochs)
                                          : 0;
  std::size_t epoch = 0;
  for (int phase = 0; phase < (phase2 ? 2 : 1); ++phase) {
    const bool decoder_phase = phase == 1;
    const std::size_t n_epochs = decoder_phase ? phase2 : cfg.epochs;
    auto objective = [&](const LossBreakdown& l) {
      return decoder_phase ? l.reconstruction : weighted_total(l.isometry, l.bending, l.reconstruction, phase_weights);
    };
    double best = objective(result.initial_test);
    if (decoder_phase)
      best = evaluate_nets(result.encoder, &*result.decoder, test, cfg.weights).reconstruction;
    EncoderNet best_enc = result.encoder;
    std::optional<EncoderNet> best_dec = result.decoder;
    std::size_t since_best = 0;

    for (std::size_t e = 0; e < n_epochs; ++e) {
      ++epoch;
      const std::vector<SampleTriple> data =
          draw(cfg, StreamKey(cfg.seed, "train", epoch), cfg.epoch_size);
      std::vector<double> iso, bend, rec, sizes;
      for (std::size_t lo = 0; lo < data.size(); lo += cfg.batch) {
        const auto part =
            std::span<const SampleTriple>(data).subspan(lo, std::min(cfg.batch, data.size() - lo));
        const Eigen::MatrixXd x = stack_inputs(part);
        const double w = static_cast<double>(part.size());
        sizes.push_back(w);
        if (!decoder_phase) {
          ForwardTape tape;
          const Eigen::MatrixXd z = forward_batch(result.encoder, x, &tape);
          Eigen::MatrixXd dz;
          const LossBreakdown p = pair_batch(z, part, cfg.weights, &dz);
          iso.push_back(p.isometry * w);
          bend.push_back(p.bending * w);
          if (joint) {
            NetGradients dg;
            rec.push_back(reconstruction_batch(*result.decoder, z, x, cfg.weights.kappa_rec, &dz,
                                               &dg) * w);
            adam_step(*dec_state, *result.decoder, dg);
          } else if (result.decoder) {
            rec.push_back(reconstruction_batch(*result.decoder, z, x, 1.0, nullptr, nullptr) * w);
          }
          adam_step(enc_state, result.encoder, backward(result.encoder, tape, dz));
        } else {
          const Eigen::MatrixXd z = forward_batch(result.encoder, x);
          const LossBreakdown p = pair_batch(z, part, cfg.weights, nullptr);
          iso.push_back(p.isometry * w);
          bend.push_back(p.bending * w);
          NetGradients dg;
          rec.push_back(reconstruction_batch(*result.decoder, z, x, 1.0, nullptr, &dg) * w);
          adam_step(*dec_state, *result.decoder, dg);
        }
      }
      EpochLog row;
      row.epoch = epoch;
      row.decoder_phase = decoder_phase;
      const double n = pairwise_sum(sizes);
      row.train.isometry = pairwise_sum(iso) / n;
      row.train.bending = pairwise_sum(bend) / n;
      row.train.reconstruction = rec.empty() ? 0.0 : pairwise_sum(rec) / n;
      row.train.n_samples = data.size();
      finish(row.train, cfg.weights);
      row.test = evaluate_nets(result.encoder, dec_for_eval, test, cfg.weights);
      result.log.push_back(row);

      const double value = objective(row.test);
      if (value < best) {
        best = value;
        best_enc = result.encoder;
        best_dec = result.decoder;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
        result.stopped_early = true;
        break;
      }
    }
    if (cfg.patience > 0) {
      result.encoder = std::move(best_enc);
      result.decoder = std::move(best_dec);
      dec_for_eval = result.decoder ? &*result.decoder : nullptr;
    }
  }
  return result;
}

void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  CsvWriter csv(path, {"epoch", "phase", "isometry", "bending", "reconstruction", "total",
                       "test_isometry", "test_bending", "test_reconstruction", "test_total"});
  for (const EpochLog& r : log)
    csv.row_text({std::to_string(r.epoch), r.decoder_phase ? "decoder" : "encoder",
                  format_double(r.train.isometry), format_double(r.train.bending),
                  format_double(r.train.reconstruction), format_double(r.train.total),
                  format_double(r.test.isometry), format_double(r.test.bending),
                  format_double(r.test.reconstruction), format_double(r.test.total)});
}

}  // namespace lowbend
