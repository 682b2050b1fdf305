#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lowbend/datasets.hpp"
#include "lowbend/loss.hpp"
#include "lowbend/network.hpp"
#include "lowbend/sampling.hpp"

namespace lowbend {

enum class TrainMode {
  EncoderOnly,   // minimize E^S[phi]
  Joint,         // minimize E^S[phi] + kappa R[phi, psi]
  DecoderAfter,  // E^S[phi] first, then R[phi, psi] with phi frozen
};

std::string_view to_string(TrainMode mode);
TrainMode train_mode_from_string(std::string_view name);

struct TrainConfig {
  ManifoldKind kind = ManifoldKind::Hemisphere;
  SamplingStrategy strategy;
  LossWeights weights;
  std::vector<int> encoder_hidden{256, 256, 128};
  std::vector<int> decoder_hidden;  // empty: encoder_hidden reversed
  int latent = 16;
  Activation activation = Activation::Softplus;
  std::size_t epochs = 100;
  std::size_t decoder_epochs = 0;  // decoder-after phase length; 0 means `epochs`
  std::size_t epoch_size = 10000;
  std::size_t batch = 128;
  std::size_t test_size = 1000;
  TrainMode mode = TrainMode::EncoderOnly;
  std::size_t patience = 10;  // 0 disables early stopping
  AdamParams adam;
  std::uint64_t seed = 0;
  RendererConfig renderer;

  int input_dim() const { return renderer.input_dim(kind); }
  std::vector<int> encoder_widths() const;
  std::vector<int> decoder_widths() const;
  bool has_decoder() const { return mode != TrainMode::EncoderOnly; }
  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  bool decoder_phase = false;
  LossBreakdown train;  // running mean over the epoch's batches
  LossBreakdown test;
};

struct TrainResult {
  EncoderNet encoder;
  std::optional<EncoderNet> decoder;
  std::vector<EpochLog> log;
  LossBreakdown initial_test;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

/// Batched loss on a fixed triple set. Reconstruction is filled when a
/// decoder is given.
LossBreakdown evaluate_nets(const EncoderNet& encoder, const EncoderNet* decoder,
                            std::span<const SampleTriple> triples, const LossWeights& weights);

/// Columns [x_1..x_B, y_1..y_B, mid_1..mid_B] of network inputs.
Eigen::MatrixXd stack_inputs(std::span<const SampleTriple> triples);

/// Each epoch draws fresh triples from stream (seed, "train", epoch); the
/// test set comes from (seed, "test"). Early stopping watches the test
/// objective of the current phase and restores the best weights.
TrainResult train(const TrainConfig& cfg);

/// Log as CSV: epoch, phase, isometry, bending, reconstruction, total, test_*.
void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log);

}  // namespace lowbend
