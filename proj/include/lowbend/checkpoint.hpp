#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "lowbend/network.hpp"

namespace lowbend {

// Binary layout: "LOWBENDNET" magic, u32 version, u32 layer-width count,
// u32 widths, u32 activation tag, then per layer the weight matrix
// (row-major) followed by the bias vector, all as little-endian f64.
inline constexpr char kCheckpointMagic[] = "LOWBENDNET";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t epoch = 0;
};

void save_checkpoint(const std::filesystem::path& path, const EncoderNet& net);
EncoderNet load_checkpoint(const std::filesystem::path& path);

/// Sidecar "<checkpoint>.meta" with key=value lines.
void save_checkpoint_meta(const std::filesystem::path& checkpoint, const CheckpointMeta& meta);
CheckpointMeta load_checkpoint_meta(const std::filesystem::path& checkpoint);

}  // namespace lowbend
