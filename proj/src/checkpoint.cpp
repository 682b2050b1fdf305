#include "lowbend/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "lowbend/error.hpp"

namespace lowbend {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorCode::Io, "truncated checkpoint header");
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorCode::Io, "truncated checkpoint body");
  return v;
}

std::filesystem::path meta_path(const std::filesystem::path& p) {
  return std::filesystem::path(p.string() + ".meta");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const EncoderNet& net) {
  net.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(kCheckpointMagic, sizeof kCheckpointMagic - 1);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(net.widths.size()));
  for (int w : net.widths) put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, net.activation == Activation::Softplus ? 0u : 1u);
  for (std::size_t k = 0; k < net.layers(); ++k) {
    const auto& w = net.weights[k];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) put_f64(out, w(i, j));
    for (Eigen::Index i = 0; i < net.biases[k].size(); ++i) put_f64(out, net.biases[k][i]);
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

EncoderNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open checkpoint " + path.string());
  char magic[sizeof kCheckpointMagic - 1];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw Error(ErrorCode::Io, path.string() + " is not a lowbend checkpoint");
  if (get_u32(in) != kCheckpointVersion)
    throw Error(ErrorCode::Io, "unsupported checkpoint version in " + path.string());
  const std::uint32_t n = get_u32(in);
  if (n < 2 || n > 1024) throw Error(ErrorCode::Io, "implausible layer count in checkpoint");
  EncoderNet net;
  for (std::uint32_t i = 0; i < n; ++i) net.widths.push_back(static_cast<int>(get_u32(in)));
  const std::uint32_t act = get_u32(in);
  if (act > 1) throw Error(ErrorCode::Io, "unknown activation tag in checkpoint");
  net.activation = act == 0 ? Activation::Softplus : Activation::Tanh;
  for (std::size_t k = 0; k + 1 < net.widths.size(); ++k) {
    Eigen::MatrixXd w(net.widths[k + 1], net.widths[k]);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = get_f64(in);
    Eigen::VectorXd b(net.widths[k + 1]);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = get_f64(in);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw Error(ErrorCode::Io, "trailing bytes in checkpoint " + path.string());
  net.validate();
  return net;
}

void save_checkpoint_meta(const std::filesystem::path& checkpoint, const CheckpointMeta& meta) {
  std::ofstream out(meta_path(checkpoint));
  if (!out) throw Error(ErrorCode::Io, "cannot write checkpoint metadata");
  out << "seed=" << meta.seed << "\nconfig_hash=" << meta.config_hash << "\nepoch=" << meta.epoch
      << '\n';
}

CheckpointMeta load_checkpoint_meta(const std::filesystem::path& checkpoint) {
  std::ifstream in(meta_path(checkpoint));
  if (!in) throw Error(ErrorCode::Io, "missing checkpoint metadata for " + checkpoint.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  CheckpointMeta meta;
  try {
    meta.seed = std::stoull(kv.at("seed"));
    meta.config_hash = kv.at("config_hash");
    meta.epoch = std::stoull(kv.at("epoch"));
  } catch (const std::exception&) {
    throw Error(ErrorCode::Io, "malformed checkpoint metadata for " + checkpoint.string());
  }
  return meta;
}

}  // namespace lowbend
