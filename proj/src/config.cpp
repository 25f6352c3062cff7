#include "ssdaae/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "ssdaae/errors.hpp"

namespace ssdaae {

ArchConfig RunConfig::arch() const {
  if (arch_preset == "paper") return ArchConfig::paper();
  if (arch_preset == "desk") return ArchConfig::desk();
  throw ConfigError("arch.preset: unknown preset '" + arch_preset + "' (expected paper or desk)");
}

void RunConfig::validate() const {
  arch();
  train.validate();
  if (threshold_split != "self" && threshold_split != "val") {
    throw ConfigError("eval.threshold_split: expected self or val, got '" + threshold_split + "'");
  }
  if (sweep_sigmas.empty()) throw ConfigError("sweep.sigmas: empty list");
  for (double s : sweep_sigmas) {
    if (!(s >= 0.0)) throw ConfigError("sweep.sigmas: negative sigma");
  }
}

namespace {

struct Field {
  std::string key;
  std::function<nlohmann::json(const RunConfig&)> get;
  std::function<void(RunConfig&, const nlohmann::json&)> set;
};

template <typename M>
Field field(std::string key, M RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return nlohmann::json(c.*member); },
          [member](RunConfig& c, const nlohmann::json& j) { c.*member = j.get<M>(); }};
}

template <typename S, typename M>
Field nested(std::string key, S RunConfig::*outer, M S::*member) {
  return {key, [outer, member](const RunConfig& c) { return nlohmann::json(c.*outer.*member); },
          [outer, member](RunConfig& c, const nlohmann::json& j) { c.*outer.*member = j.get<M>(); }};
}

template <typename M>
Field weight(std::string key, M LossWeights::*member) {
  return {key, [member](const RunConfig& c) { return nlohmann::json(c.train.weights.*member); },
          [member](RunConfig& c, const nlohmann::json& j) { c.train.weights.*member = j.get<M>(); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"variant", [](const RunConfig& c) { return nlohmann::json(std::string(name_of(c.variant))); },
                 [](RunConfig& c, const nlohmann::json& j) { c.variant = parse_variant(j.get<std::string>()); }});
    f.push_back(field("seed", &RunConfig::seed));
    f.push_back(field("arch.preset", &RunConfig::arch_preset));
    f.push_back(nested("train.epochs", &RunConfig::train, &TrainConfig::epochs));
    f.push_back(nested("train.batch_size", &RunConfig::train, &TrainConfig::batch_size));
    f.push_back(nested("train.lr_autoencoder", &RunConfig::train, &TrainConfig::lr_autoencoder));
    f.push_back(nested("train.lr_discriminator", &RunConfig::train, &TrainConfig::lr_discriminator));
    f.push_back(nested("train.momentum_autoencoder", &RunConfig::train, &TrainConfig::momentum_autoencoder));
    f.push_back(nested("train.momentum_discriminator", &RunConfig::train, &TrainConfig::momentum_discriminator));
    f.push_back(nested("train.sigma", &RunConfig::train, &TrainConfig::sigma));
    f.push_back({"train.mode", [](const RunConfig& c) { return nlohmann::json(std::string(name_of(c.train.mode))); },
                 [](RunConfig& c, const nlohmann::json& j) { c.train.mode = parse_train_mode(j.get<std::string>()); }});
    f.push_back(nested("train.pretrain_epochs", &RunConfig::train, &TrainConfig::pretrain_epochs));
    f.push_back(nested("train.regularise_label_head", &RunConfig::train, &TrainConfig::regularise_label_head));
    f.push_back(nested("train.label_prior", &RunConfig::train, &TrainConfig::label_prior));
    f.push_back(weight("loss.alpha", &LossWeights::alpha));
    f.push_back(weight("loss.beta", &LossWeights::beta));
    f.push_back(weight("loss.eta", &LossWeights::eta));
    f.push_back(weight("loss.a", &LossWeights::a));
    f.push_back(weight("loss.b", &LossWeights::b));
    f.push_back(field("data.dir", &RunConfig::data_dir));
    f.push_back(nested("data.synth.n_per_class", &RunConfig::synth, &SynthSpec::n_per_class));
    f.push_back(nested("data.synth.seed", &RunConfig::synth, &SynthSpec::seed));
    f.push_back(field("data.augment", &RunConfig::augment));
    f.push_back(nested("split.n_unlabelled", &RunConfig::split, &SplitSpec::n_unlabelled));
    f.push_back(nested("split.n_labelled_train", &RunConfig::split, &SplitSpec::n_labelled_train));
    f.push_back(nested("split.n_val", &RunConfig::split, &SplitSpec::n_val));
    f.push_back(nested("split.n_test", &RunConfig::split, &SplitSpec::n_test));
    f.push_back(nested("split.seed", &RunConfig::split, &SplitSpec::seed));
    f.push_back(field("out", &RunConfig::out));
    f.push_back(field("checkpoint_every", &RunConfig::checkpoint_every));
    f.push_back(field("eval.threshold_split", &RunConfig::threshold_split));
    f.push_back(field("sweep.sigmas", &RunConfig::sweep_sigmas));
    return f;
  }();
  return table;
}

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void set_field(RunConfig& config, const Field& f, const nlohmann::json& value) {
  try {
    f.set(config, value);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + f.key + "': value " + value.dump() + " has the wrong type");
  } catch (const ConfigError& e) {
    throw ConfigError("config key '" + f.key + "': " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& key_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& f : fields()) n.push_back(f.key);
    return n;
  }();
  return names;
}

Json to_json(const RunConfig& config) {
  Json out = Json::object();
  for (const auto& f : fields()) out[f.key] = f.get(config);
  return out;
}

RunConfig config_from_json(const nlohmann::json& flat) {
  if (!flat.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig config;
  for (auto it = flat.begin(); it != flat.end(); ++it) set_field(config, find_field(it.key()), it.value());
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

void apply_override(RunConfig& config, std::string_view key, std::string_view value) {
  const Field& f = find_field(key);
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = std::string(value);
  // A value that parses as a number but is meant as a string (e.g. a directory
  // named "1") still lands correctly because strings are tried second.
  try {
    f.set(config, parsed);
  } catch (const nlohmann::json::exception&) {
    set_field(config, f, nlohmann::json(std::string(value)));
  } catch (const ConfigError& e) {
    throw ConfigError("config key '" + f.key + "': " + e.what());
  }
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  apply_override(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr)) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

std::string config_hash(const RunConfig& config) { return sha256_hex(to_json(config).dump()); }

std::string shared_hyperparameter_hash(const RunConfig& config) {
  Json j = to_json(config);
  j.erase("variant");
  j.erase("train.sigma");
  j.erase("out");
  return sha256_hex(j.dump());
}

Model build_model(const RunConfig& config) {
  return Model(config.variant, config.arch(), config.train.sigma, config.seed);
}

TrainConfig train_config(const RunConfig& config) {
  TrainConfig t = config.train;
  t.seed = config.seed;
  return t;
}

std::filesystem::path default_output_root() {
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return "runs";
}

}  // namespace ssdaae
