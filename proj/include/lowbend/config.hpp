#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lowbend/trainer.hpp"

namespace lowbend {

struct EvalOptions {
  bool pca = true;
  bool interpolation = true;
  bool scatter = true;
  bool self_intersection = true;
  std::size_t points = 2000;  // latent cloud size for PCA
  std::size_t pairs = 1000;   // test pairs for err and scatter
  int grid = 16;              // self-intersection grid steps per dimension
  int projection_dims = 3;
  std::vector<double> deltas;  // empty: eight steps up to the diameter
};

struct VerifyOptions {
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  std::size_t samples = 100000;
  std::size_t taylor_trials = 64;
  std::vector<double> radii{0.2, 0.1, 0.05, 0.025, 0.0125};
  std::vector<std::size_t> mc_sizes{100, 1000, 10000, 100000};
};

/// One experiment: training, data generation, evaluation and verification
/// settings plus the output directory.
struct ExperimentConfig {
  TrainConfig train;
  std::size_t data_count = 1000;
  EvalOptions eval;
  VerifyOptions verify;
  std::string out_dir = "run";

  void validate() const;
};

/// Flat key=value text with dotted section prefixes, keys sorted, reals
/// written with 17 significant digits so parse(print(c)) == c.
std::string print_config(const ExperimentConfig& cfg);

/// Unknown keys and malformed values raise ConfigParse naming the line.
/// Unset strategy.epsilon / strategy.min_dist default from the kind.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// 16 hex digits of the FNV-1a hash of print_config.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace lowbend
