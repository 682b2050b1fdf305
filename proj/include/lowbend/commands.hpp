#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lowbend/config.hpp"

namespace lowbend {

inline constexpr const char* kVersion = "0.1.0";

// Each command writes below cfg.out_dir and leaves a run_manifest.txt there
// (command, config hash, seed, versions). The effective config is saved as
// config.txt so a run directory can be replayed on its own.

/// <out>/data: manifest.txt, triples.txt, payloads.bin.
void cmd_gen_data(const ExperimentConfig& cfg);

/// <out>/encoder.bin (+ .meta), decoder.bin when trained, training_log.csv.
void cmd_train(const ExperimentConfig& cfg);

/// <out>/eval: pca_variance.csv, err_by_delta.csv, scatter.csv,
/// self_intersection.csv. Without a checkpoint the nets are freshly
/// initialized from the seed. The decoder is read from decoder.bin next to
/// the encoder checkpoint when present.
void cmd_eval(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& checkpoint);

/// <out>/verify: taylor.csv, volume.csv, convergence.csv, mc_rate.csv and
/// verify_report.json. A chart-input checkpoint adds its limit functional.
void cmd_verify(const ExperimentConfig& cfg,
                const std::optional<std::filesystem::path>& checkpoint);

/// Machine-readable error record {"error": code, "message": text}.
std::string error_record(const std::string& code, const std::string& message);

}  // namespace lowbend
