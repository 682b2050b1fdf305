#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lowbend/commands.hpp"
#include "lowbend/error.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string checkpoint;
};

lowbend::ExperimentConfig resolve(const Options& o) {
  lowbend::ExperimentConfig cfg =
      o.config.empty() ? lowbend::parse_config("") : lowbend::load_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) cfg.train.seed = *o.seed;
  return cfg;
}

std::optional<std::filesystem::path> checkpoint_of(const Options& o) {
  if (o.checkpoint.empty()) return std::nullopt;
  return std::filesystem::path(o.checkpoint);
}

int fail(const Options& o, const std::string& code, const std::string& message) {
  const std::string record = lowbend::error_record(code, message);
  std::cerr << record << '\n';
  if (!o.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    std::ofstream(std::filesystem::path(o.out) / "error.json") << record << '\n';
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-bending, low-distortion manifold encoders"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "key=value experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "run directory (overrides out_dir)");
    sub->add_option("--seed", opt.seed, "root seed (overrides seed)");
  };
  CLI::App* gen = app.add_subcommand("gen-data", "sample triples and render payloads");
  CLI::App* trn = app.add_subcommand("train", "train encoder (and decoder)");
  CLI::App* evl = app.add_subcommand("eval", "PCA, interpolation error, scatter, self-intersection");
  CLI::App* ver = app.add_subcommand("verify", "numerical checks of the limit analysis");
  for (CLI::App* sub : {gen, trn, evl, ver}) add_common(sub);
  evl->add_option("--checkpoint", opt.checkpoint, "encoder checkpoint")->check(CLI::ExistingFile);
  ver->add_option("--checkpoint", opt.checkpoint, "chart-input encoder checkpoint")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const lowbend::ExperimentConfig cfg = resolve(opt);
    if (gen->parsed()) lowbend::cmd_gen_data(cfg);
    else if (trn->parsed()) lowbend::cmd_train(cfg);
    else if (evl->parsed()) lowbend::cmd_eval(cfg, checkpoint_of(opt));
    else if (ver->parsed()) lowbend::cmd_verify(cfg, checkpoint_of(opt));
  } catch (const lowbend::Error& e) {
    return fail(opt, std::string(lowbend::to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return fail(opt, "Internal", e.what());
  }
  return 0;
}
