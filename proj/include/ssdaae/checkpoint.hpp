#pragma once

#include <filesystem>
#include <optional>

#include "ssdaae/config.hpp"
#include "ssdaae/model.hpp"
#include "ssdaae/training.hpp"

namespace ssdaae {

// Checkpoint directory layout:
//   manifest.json              kind, config + hash, epoch, step, RNG state,
//                              parameter names/shapes/files, optimizer settings
//   params/<name>.f32          raw little-endian float32, row-major over shape
//   optim/<opt>/<name>.sq.f32  RMSProp square averages
//   optim/<opt>/<name>.mom.f32 RMSProp momentum buffers
//   best/<name>.f32            best-so-far parameters when they differ from params/
struct CheckpointInfo {
  RunConfig config;
  std::string config_hash;
  std::size_t epoch = 0;
  std::size_t step = 0;
};

void save_checkpoint(const std::filesystem::path& dir, Model& model, const RunConfig& config, std::size_t epoch,
                     Trainer* trainer = nullptr, const LoopState* loop = nullptr);

CheckpointInfo read_checkpoint_info(const std::filesystem::path& dir);
// Rebuilds the model from the stored config and loads its parameters.
Model load_model(const std::filesystem::path& dir);
// Restores optimizer buffers, trainer RNG, step count and loop state.
void restore_training_state(const std::filesystem::path& dir, Trainer& trainer, LoopState& loop);

void write_f32_blob(const std::filesystem::path& path, std::span<const float> values);
std::vector<float> read_f32_blob(const std::filesystem::path& path, std::size_t expected);

}  // namespace ssdaae
