#include "lowbend/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "lowbend/csv.hpp"
#include "lowbend/error.hpp"
#include "lowbend/random.hpp"

namespace lowbend {

namespace {

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s[0] == '-') throw std::invalid_argument("expected a nonnegative integer");
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw std::invalid_argument("expected 0/1 or true/false");
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

template <typename T, typename F>
std::vector<T> split(const std::string& s, F parse) {
  std::vector<T> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(item));
  return out;
}

std::string ints(const std::vector<int>& v) {
  return join(v, [](int x) { return std::to_string(x); });
}
std::string reals(const std::vector<double>& v) { return join(v, format_double); }

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define LB_REAL(key, member)                                                        \
  {key, {[](const ExperimentConfig& c) { return format_double(c.member); },         \
         [](ExperimentConfig& c, const std::string& s) { c.member = to_double(s); }}}
#define LB_SIZE(key, member)                                                        \
  {key, {[](const ExperimentConfig& c) { return std::to_string(c.member); },        \
         [](ExperimentConfig& c, const std::string& s) { c.member = to_u64(s); }}}
#define LB_INT(key, member)                                                         \
  {key, {[](const ExperimentConfig& c) { return std::to_string(c.member); },        \
         [](ExperimentConfig& c, const std::string& s) { c.member = to_int(s); }}}
#define LB_BOOL(key, member)                                                        \
  {key, {[](const ExperimentConfig& c) { return std::string(c.member ? "1" : "0"); }, \
         [](ExperimentConfig& c, const std::string& s) { c.member = to_bool(s); }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"kind",
       {[](const ExperimentConfig& c) { return std::string(to_string(c.train.kind)); },
        [](ExperimentConfig& c, const std::string& s) { c.train.kind = kind_from_string(s); }}},
      LB_SIZE("seed", train.seed),
      {"out_dir",
       {[](const ExperimentConfig& c) { return c.out_dir; },
        [](ExperimentConfig& c, const std::string& s) { c.out_dir = s; }}},
      {"strategy.tag",
       {[](const ExperimentConfig& c) { return std::string(to_string(c.train.strategy.tag)); },
        [](ExperimentConfig& c, const std::string& s) {
          c.train.strategy.tag = strategy_from_string(s);
        }}},
      LB_REAL("strategy.epsilon", train.strategy.epsilon),
      LB_REAL("strategy.min_dist", train.strategy.min_dist),
      LB_REAL("weights.lambda", train.weights.lambda),
      LB_REAL("weights.c", train.weights.c),
      LB_REAL("weights.kappa_rec", train.weights.kappa_rec),
      {"network.hidden",
       {[](const ExperimentConfig& c) { return ints(c.train.encoder_hidden); },
        [](ExperimentConfig& c, const std::string& s) {
          c.train.encoder_hidden = split<int>(s, to_int);
        }}},
      {"network.decoder_hidden",
       {[](const ExperimentConfig& c) { return ints(c.train.decoder_hidden); },
        [](ExperimentConfig& c, const std::string& s) {
          c.train.decoder_hidden = split<int>(s, to_int);
        }}},
      LB_INT("network.latent", train.latent),
      {"network.activation",
       {[](const ExperimentConfig& c) { return std::string(to_string(c.train.activation)); },
        [](ExperimentConfig& c, const std::string& s) {
          c.train.activation = activation_from_string(s);
        }}},
      LB_SIZE("training.epochs", train.epochs),
      LB_SIZE("training.decoder_epochs", train.decoder_epochs),
      LB_SIZE("training.epoch_size", train.epoch_size),
      LB_SIZE("training.batch", train.batch),
      LB_SIZE("training.test_size", train.test_size),
      LB_SIZE("training.early_stop_patience", train.patience),
      {"training.mode",
       {[](const ExperimentConfig& c) { return std::string(to_string(c.train.mode)); },
        [](ExperimentConfig& c, const std::string& s) {
          c.train.mode = train_mode_from_string(s);
        }}},
      LB_REAL("adam.lr", train.adam.lr),
      LB_REAL("adam.beta1", train.adam.beta1),
      LB_REAL("adam.beta2", train.adam.beta2),
      LB_REAL("adam.eps", train.adam.eps),
      LB_REAL("adam.weight_decay", train.adam.weight_decay),
      {"renderer.name",
       {[](const ExperimentConfig& c) { return c.train.renderer.name; },
        [](ExperimentConfig& c, const std::string& s) { c.train.renderer.name = s; }}},
      LB_INT("renderer.resolution", train.renderer.resolution),
      {"renderer.ellipse_mode",
       {[](const ExperimentConfig& c) {
          return std::string(c.train.renderer.ellipse_mode == EllipseMode::Binary ? "binary"
                                                                                 : "smooth");
        },
        [](ExperimentConfig& c, const std::string& s) {
          if (s == "binary") c.train.renderer.ellipse_mode = EllipseMode::Binary;
          else if (s == "smooth") c.train.renderer.ellipse_mode = EllipseMode::Smooth;
          else throw std::invalid_argument("expected binary or smooth");
        }}},
      LB_REAL("renderer.ellipse_k", train.renderer.ellipse_k),
      LB_REAL("renderer.sundial.rod_height", train.renderer.sundial.rod_height),
      LB_REAL("renderer.sundial.half_width", train.renderer.sundial.half_width),
      LB_REAL("renderer.sundial.sigma_orth", train.renderer.sundial.sigma_orth),
      LB_REAL("renderer.splat.radius", train.renderer.splat.splat_radius),
      LB_REAL("renderer.splat.opacity", train.renderer.splat.opacity),
      LB_REAL("renderer.splat.half_width", train.renderer.splat.half_width),
      LB_SIZE("data.count", data_count),
      LB_BOOL("eval.pca", eval.pca),
      LB_BOOL("eval.interpolation", eval.interpolation),
      LB_BOOL("eval.scatter", eval.scatter),
      LB_BOOL("eval.self_intersection", eval.self_intersection),
      LB_SIZE("eval.points", eval.points),
      LB_SIZE("eval.pairs", eval.pairs),
      LB_INT("eval.grid", eval.grid),
      LB_INT("eval.projection_dims", eval.projection_dims),
      {"eval.deltas",
       {[](const ExperimentConfig& c) { return reals(c.eval.deltas); },
        [](ExperimentConfig& c, const std::string& s) {
          c.eval.deltas = split<double>(s, to_double);
        }}},
      {"verify.epsilons",
       {[](const ExperimentConfig& c) { return reals(c.verify.epsilons); },
        [](ExperimentConfig& c, const std::string& s) {
          c.verify.epsilons = split<double>(s, to_double);
        }}},
      {"verify.radii",
       {[](const ExperimentConfig& c) { return reals(c.verify.radii); },
        [](ExperimentConfig& c, const std::string& s) {
          c.verify.radii = split<double>(s, to_double);
        }}},
      {"verify.mc_sizes",
       {[](const ExperimentConfig& c) {
          return join(c.verify.mc_sizes, [](std::size_t x) { return std::to_string(x); });
        },
        [](ExperimentConfig& c, const std::string& s) {
          c.verify.mc_sizes = split<std::size_t>(s, to_u64);
        }}},
      LB_SIZE("verify.samples", verify.samples),
      LB_SIZE("verify.taylor_trials", verify.taylor_trials),
  };
  return table;
}

#undef LB_REAL
#undef LB_SIZE
#undef LB_INT
#undef LB_BOOL

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  train.validate();
  if (eval.grid < 2) throw Error(ErrorCode::InvalidArgument, "eval.grid must be >= 2");
  if (eval.points < 2) throw Error(ErrorCode::InvalidArgument, "eval.points must be >= 2");
  if (eval.pairs < 1) throw Error(ErrorCode::InvalidArgument, "eval.pairs must be >= 1");
  if (eval.projection_dims < 1)
    throw Error(ErrorCode::InvalidArgument, "eval.projection_dims must be positive");
}

std::string print_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + '=' + field.get(cfg) + '\n';
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_eps = false, have_min = false;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigParse, where + "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) throw Error(ErrorCode::ConfigParse, where + "unknown key '" + key + "'");
    if (seen.count(key))
      throw Error(ErrorCode::ConfigParse,
                  where + "duplicate key '" + key + "' (first on line " +
                      std::to_string(seen[key]) + ")");
    seen[key] = lineno;
    try {
      it->second.set(cfg, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigParse, where + key + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ConfigParse, where + "bad value '" + value + "' for " + key);
    }
    have_eps |= key == "strategy.epsilon";
    have_min |= key == "strategy.min_dist";
  }
  if (!have_eps) cfg.train.strategy.epsilon = 0.25 * diameter(cfg.train.kind);
  if (!have_min) cfg.train.strategy.min_dist = default_min_dist(cfg.train.kind);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(print_config(cfg))));
  return buf;
}

}  // namespace lowbend
