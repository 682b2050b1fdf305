#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lowbend {

/// Identifies an independent random stream: stream = hash(seed, label, index).
/// Derived keys never depend on thread count or evaluation order.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t label_hash = 0;
  std::uint64_t index = 0;

  StreamKey() = default;
  StreamKey(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

  /// Key for a sub-stream, e.g. one Monte Carlo chunk.
  StreamKey child(std::string_view label, std::uint64_t index) const;

  std::uint64_t mix() const;
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

class RngStream {
 public:
  explicit RngStream(const StreamKey& key) : engine_(key.mix()) {}
  explicit RngStream(std::uint64_t raw_seed) : engine_(raw_seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return normal_(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lowbend
