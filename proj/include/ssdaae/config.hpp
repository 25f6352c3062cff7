#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ssdaae/data.hpp"
#include "ssdaae/model.hpp"
#include "ssdaae/training.hpp"

namespace ssdaae {

// Everything needed to reproduce a run. Serialised as one JSON object with flat
// dotted keys (see key_names()); `seed` drives initialisation, corruption noise
// and batch order.
struct RunConfig {
  VariantKind variant = VariantKind::ssdaae;
  std::uint64_t seed = 0;
  std::string arch_preset = "paper";  // paper | desk
  TrainConfig train;
  std::string data_dir;  // preprocessed dataset directory; empty = synthetic corpus
  SynthSpec synth;
  bool augment = false;  // augment the labelled training split after splitting
  SplitSpec split;
  std::string out;
  std::size_t checkpoint_every = 1;  // epochs between checkpoints, 0 = final only
  std::string threshold_split = "self";  // self | val
  std::vector<double> sweep_sigmas{0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0};

  ArchConfig arch() const;
  // Throws ConfigError describing the first invalid field.
  void validate() const;
};

using Json = nlohmann::ordered_json;

const std::vector<std::string>& key_names();
Json to_json(const RunConfig& config);
// Keys not present keep their defaults. Unknown keys and ill-typed values throw
// ConfigError naming the key.
RunConfig config_from_json(const nlohmann::json& flat);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& config);
// `value` is parsed as JSON when possible, otherwise taken as a string.
void apply_override(RunConfig& config, std::string_view key, std::string_view value);
// Parses "key=value".
void apply_override(RunConfig& config, std::string_view assignment);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);
// Hash of the canonical serialisation.
std::string config_hash(const RunConfig& config);
// Hash of the hyperparameters shared across an ablation or sweep: everything
// except the variant, the corruption level and the output location.
std::string shared_hyperparameter_hash(const RunConfig& config);

// Model for config.variant at the configured architecture, sigma and seed.
Model build_model(const RunConfig& config);
// Training settings with the run seed applied.
TrainConfig train_config(const RunConfig& config);

// Output root used when --out is not given: $SSDAAE_OUT, else ./runs.
inline constexpr const char* kOutputRootEnv = "SSDAAE_OUT";
std::filesystem::path default_output_root();

}  // namespace ssdaae
