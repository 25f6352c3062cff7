#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssdaae/checkpoint.hpp"
#include "ssdaae/config.hpp"
#include "ssdaae/metrics.hpp"

namespace ssdaae {

// Splits for a run: the preprocessed dataset directory when configured,
// otherwise the seeded synthetic corpus split per config.split. With
// data.augment the two training splits are augmented after splitting.
Splits load_splits(const RunConfig& config);

struct TrainOutcome {
  std::filesystem::path run_dir;
  TrainResult result;
  MetricsReport test;
  std::string step_log_sha256;
  std::string config_hash;
  std::string shared_hash;
};

struct TrainOptions {
  std::optional<std::filesystem::path> resume;  // checkpoint directory to continue from
  std::ostream* log = nullptr;
};

// Run directory contents:
//   config.json, steps.jsonl (+ steps.sha256), epochs.jsonl,
//   checkpoints/epoch-NNNN/, best/, val/epoch-NNNN.csv,
//   test_metrics.csv, test_scores.csv, summary.json
TrainOutcome cmd_train(const RunConfig& config, const TrainOptions& options = {});
TrainOutcome cmd_train(const RunConfig& config, const Splits& splits, const TrainOptions& options = {});

// Scores `split` (val or test) with a checkpoint. With eval.threshold_split=val
// the thresholds chosen on the validation split are applied to `split`.
MetricsReport cmd_eval(const std::filesystem::path& checkpoint, const RunConfig& data_config,
                       const std::string& split, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

struct TableRow {
  std::string model;  // variant name, or sigma for the sweep
  OperatingPoint point;
  double auc = 0.0;
};

// Trains all six variants with identical shared hyperparameters and data.
// Writes <out>/ablation.csv (variant,target,threshold,sensitivity,specificity,auc)
// and <out>/<variant>/ run directories.
std::vector<TableRow> cmd_ablate(const RunConfig& config, std::ostream* log = nullptr);
// One ssDAAE per sigma in config.sweep_sigmas. Writes <out>/noise_sweep.csv
// (sigma,target,threshold,sensitivity,specificity,auc).
std::vector<TableRow> cmd_noise_sweep(const RunConfig& config, std::ostream* log = nullptr);

enum class SampleLabel { zero, one, random, both };
// Writes a PNG grid of n decoded prior samples. `both` writes <stem>_y0.png and
// <stem>_y1.png from the same latent draws. Returns the written paths.
std::vector<std::filesystem::path> cmd_sample(const std::filesystem::path& checkpoint, std::size_t n,
                                              SampleLabel label, std::uint64_t seed,
                                              const std::filesystem::path& out_png);

struct PreprocessSummary {
  std::size_t ingested = 0;
  std::size_t rejected = 0;
  std::size_t undecodable = 0;
  std::string manifest_sha256;
};
// Ingest with identifier-patch removal, split, optionally augment, write a dataset directory.
PreprocessSummary cmd_preprocess(const std::filesystem::path& image_dir, const std::filesystem::path& labels_csv,
                                 const std::filesystem::path& out_dir, const RunConfig& config,
                                 std::ostream* log = nullptr);
// Writes the synthetic corpus as a dataset directory.
std::string cmd_synth_data(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace ssdaae
