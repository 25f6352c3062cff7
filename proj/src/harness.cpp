#include "ssdaae/harness.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ssdaae/errors.hpp"

namespace ssdaae {

namespace fs = std::filesystem;

namespace {

std::ostream& sink(std::ostream* log) {
  static std::ostream null(nullptr);
  return log ? *log : null;
}

std::string epoch_tag(std::size_t epoch) {
  std::ostringstream s;
  s << "epoch-" << std::setw(4) << std::setfill('0') << epoch;
  return s.str();
}

std::string dir_name(VariantKind kind) {
  std::string name(name_of(kind));
  for (char& c : name) {
    if (c == '+') c = '_';
  }
  return name;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

Json step_record(const StepReport& r) {
  return {{"step", r.step},
          {"labelled", r.labelled},
          {"l_class", optional_number(r.l_class)},
          {"l_rec", optional_number(r.l_rec)},
          {"l_reg_z", optional_number(r.l_reg_z)},
          {"l_reg_y", optional_number(r.l_reg_y)},
          {"l_disc_z", optional_number(r.l_disc_z)},
          {"l_disc_y", optional_number(r.l_disc_y)},
          {"l_encoder", optional_number(r.l_encoder)}};
}

Json report_json(const MetricsReport& r) {
  Json rows = Json::array();
  for (const auto& p : r.rows) {
    rows.push_back({{"target", p.target},
                    {"threshold", p.threshold},
                    {"sensitivity", p.sensitivity},
                    {"specificity", p.specificity}});
  }
  return {{"split", r.split}, {"checkpoint", r.checkpoint}, {"auc", r.auc}, {"rows", rows}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

const Dataset& split_by_name(const Splits& s, const std::string& name) {
  if (name == "test") return s.test;
  if (name == "val") return s.val;
  if (name == "labelled_train") return s.labelled_train;
  throw ConfigError("unknown evaluation split '" + name + "' (expected test, val or labelled_train)");
}

// Scores `target` and fixes thresholds either on `target` itself or on `val`.
MetricsReport protocol_report(Model& model, const Splits& splits, const std::string& target,
                              const std::string& threshold_split, const std::string& checkpoint) {
  ScoredSet set = score(model, split_by_name(splits, target), target);
  set.checkpoint = checkpoint;
  if (threshold_split == "val" && target != "val") {
    ScoredSet val = score(model, splits.val, "val");
    return apply_thresholds(make_report(val), set);
  }
  return make_report(set);
}

void write_table(const fs::path& path, const std::string& key, const std::vector<TableRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << key << ",target,threshold,sensitivity,specificity,auc\n";
  for (const auto& r : rows) {
    out << r.model << ',' << format_number(r.point.target) << ',' << format_number(r.point.threshold) << ','
        << format_number(r.point.sensitivity) << ',' << format_number(r.point.specificity) << ','
        << format_number(r.auc) << '\n';
  }
}

// Sensitivity target against specificity, one series per model.
void write_series(const fs::path& path, const std::vector<TableRow>& rows) {
  Json series = Json::object();
  for (const auto& r : rows) series[r.model].push_back({r.point.target, r.point.specificity});
  write_text(path, series.dump(2) + "\n");
}

std::string sigma_label(double sigma) {
  std::ostringstream s;
  s << sigma;
  return s.str();
}

}  // namespace

Splits load_splits(const RunConfig& config) {
  Splits splits;
  if (!config.data_dir.empty()) {
    splits = read_dataset_dir(config.data_dir);
  } else {
    Dataset corpus = synth_generate(config.synth);
    splits = split(corpus, config.split);
  }
  if (config.augment) {
    splits.labelled_train = augment(splits.labelled_train, config.split.seed);
    splits.unlabelled = augment(splits.unlabelled, config.split.seed);
  }
  return splits;
}

TrainOutcome cmd_train(const RunConfig& config, const TrainOptions& options) {
  config.validate();
  return cmd_train(config, load_splits(config), options);
}

TrainOutcome cmd_train(const RunConfig& config, const Splits& splits, const TrainOptions& options) {
  config.validate();
  std::ostream& log = sink(options.log);
  TrainOutcome outcome;
  outcome.run_dir = config.out.empty()
                        ? default_output_root() / (dir_name(config.variant) + "-seed" + std::to_string(config.seed))
                        : fs::path(config.out);
  fs::create_directories(outcome.run_dir);
  RunConfig identity = config;
  identity.out.clear();
  outcome.config_hash = config_hash(identity);
  outcome.shared_hash = shared_hyperparameter_hash(config);
  save_config(outcome.run_dir / "config.json", config);

  Model model = options.resume ? load_model(*options.resume) : build_model(config);
  if (options.resume && read_checkpoint_info(*options.resume).config_hash != outcome.config_hash) {
    throw ConfigError("resume checkpoint was written by a different config");
  }

  const fs::path steps_path = outcome.run_dir / "steps.jsonl";
  std::ofstream steps(steps_path, options.resume ? std::ios::app : std::ios::trunc);
  std::ofstream epochs(outcome.run_dir / "epochs.jsonl", options.resume ? std::ios::app : std::ios::trunc);
  if (!steps || !epochs) throw std::runtime_error("cannot write logs in " + outcome.run_dir.string());

  const TrainConfig tc = train_config(config);
  TrainHooks hooks;
  hooks.on_step = [&](const StepReport& r) { steps << step_record(r).dump() << '\n'; };
  hooks.on_start = [&](Trainer& trainer, LoopState& loop) {
    if (options.resume) restore_training_state(*options.resume, trainer, loop);
  };
  const std::size_t total_epochs =
      tc.epochs + (tc.mode == TrainMode::pretrain_then_finetune && model.flags().unlabelled ? tc.pretrain_epochs : 0);
  hooks.on_epoch = [&](const EpochSummary& s, Trainer& trainer, const LoopState& loop) {
    Json record = {{"epoch", s.epoch}, {"pretraining", s.pretraining}, {"steps", s.steps}};
    record["mean"] = step_record(s.mean);
    record["mean"].erase("step");
    record["mean"].erase("labelled");
    if (s.validation) {
      record["validation"] = report_json(*s.validation);
      fs::create_directories(outcome.run_dir / "val");
      write_metrics_csv(outcome.run_dir / "val" / (epoch_tag(s.epoch) + ".csv"), *s.validation);
    }
    epochs << record.dump() << '\n';
    steps.flush();
    epochs.flush();
    const bool due = config.checkpoint_every > 0 && s.epoch % config.checkpoint_every == 0;
    if (due || s.epoch == total_epochs) {
      save_checkpoint(outcome.run_dir / "checkpoints" / epoch_tag(s.epoch), trainer.model(), config, s.epoch,
                      &trainer, &loop);
    }
    log << name_of(config.variant) << " epoch " << s.epoch << (s.pretraining ? " (pretraining)" : "") << ": "
        << s.steps << " steps";
    if (s.mean.l_class) log << ", l_class " << *s.mean.l_class;
    if (s.mean.l_rec) log << ", l_rec " << *s.mean.l_rec;
    if (s.validation) {
      log << ", val spec@0.95 " << s.validation->at(kSelectionSensitivity).specificity << ", auc "
          << s.validation->auc;
    }
    log << '\n';
  };

  TrainingSplits data{&splits.labelled_train, splits.unlabelled.empty() ? nullptr : &splits.unlabelled,
                      splits.val.empty() ? nullptr : &splits.val};
  outcome.result = train(model, data, tc, hooks);
  steps.close();
  epochs.close();

  outcome.step_log_sha256 = sha256_file(steps_path);
  write_text(outcome.run_dir / "steps.sha256", outcome.step_log_sha256 + "  steps.jsonl\n");
  save_checkpoint(outcome.run_dir / "best", model, config, outcome.result.best_epoch);

  Json summary = {{"variant", std::string(name_of(config.variant))},
                  {"sigma", model.corruption().sigma},
                  {"seed", config.seed},
                  {"config_hash", outcome.config_hash},
                  {"shared_hyperparameter_hash", outcome.shared_hash},
                  {"best_epoch", outcome.result.best_epoch},
                  {"step_log_sha256", outcome.step_log_sha256}};
  if (!splits.test.empty()) {
    outcome.test = protocol_report(model, splits, "test", config.threshold_split, "best");
    write_metrics_csv(outcome.run_dir / "test_metrics.csv", outcome.test);
    ScoredSet scored = score(model, splits.test, "test");
    write_scores_csv(outcome.run_dir / "test_scores.csv", scored);
    summary["test"] = report_json(outcome.test);
    log << name_of(config.variant) << " test spec@0.95 " << outcome.test.at(kSelectionSensitivity).specificity
        << ", auc " << outcome.test.auc << '\n';
  }
  write_text(outcome.run_dir / "summary.json", summary.dump(2) + "\n");
  return outcome;
}

MetricsReport cmd_eval(const fs::path& checkpoint, const RunConfig& data_config, const std::string& split_name,
                       const fs::path& out_dir, std::ostream* log) {
  Model model = load_model(checkpoint);
  const Splits splits = load_splits(data_config);
  MetricsReport report =
      protocol_report(model, splits, split_name, data_config.threshold_split, checkpoint.filename().string());
  fs::create_directories(out_dir);
  write_metrics_csv(out_dir / (split_name + "_metrics.csv"), report);
  write_scores_csv(out_dir / (split_name + "_scores.csv"), score(model, split_by_name(splits, split_name), split_name));
  sink(log) << split_name << " auc " << report.auc << '\n';
  return report;
}

std::vector<TableRow> cmd_ablate(const RunConfig& config, std::ostream* log) {
  config.validate();
  const fs::path root = config.out.empty() ? default_output_root() / "ablation" : fs::path(config.out);
  fs::create_directories(root);
  const Splits splits = load_splits(config);
  const std::string shared = shared_hyperparameter_hash(config);
  std::vector<TableRow> rows;
  for (VariantKind kind : kAllVariants) {
    RunConfig run = config;
    run.variant = kind;
    run.out = (root / dir_name(kind)).string();
    TrainOutcome outcome = cmd_train(run, splits, {std::nullopt, log});
    if (outcome.shared_hash != shared) throw ContractError("ablation runs disagree on shared hyperparameters");
    for (const auto& p : outcome.test.rows) rows.push_back({std::string(name_of(kind)), p, outcome.test.auc});
    // Rewritten after every run so a failure keeps the finished rows.
    write_table(root / "ablation.csv", "variant", rows);
  }
  write_series(root / "ablation_series.json", rows);
  write_text(root / "shared_hyperparameter_hash", shared + "\n");
  return rows;
}

std::vector<TableRow> cmd_noise_sweep(const RunConfig& config, std::ostream* log) {
  config.validate();
  const fs::path root = config.out.empty() ? default_output_root() / "noise_sweep" : fs::path(config.out);
  fs::create_directories(root);
  const Splits splits = load_splits(config);
  const std::string shared = shared_hyperparameter_hash(config);
  std::vector<TableRow> rows;
  for (double sigma : config.sweep_sigmas) {
    RunConfig run = config;
    run.variant = VariantKind::ssdaae;
    run.train.sigma = sigma;
    run.out = (root / ("sigma_" + sigma_label(sigma))).string();
    TrainOutcome outcome = cmd_train(run, splits, {std::nullopt, log});
    if (outcome.shared_hash != shared) throw ContractError("sweep runs disagree on shared hyperparameters");
    for (const auto& p : outcome.test.rows) rows.push_back({sigma_label(sigma), p, outcome.test.auc});
    write_table(root / "noise_sweep.csv", "sigma", rows);
  }
  write_series(root / "noise_sweep_series.json", rows);
  write_text(root / "shared_hyperparameter_hash", shared + "\n");
  return rows;
}

std::vector<fs::path> cmd_sample(const fs::path& checkpoint, std::size_t n, SampleLabel label, std::uint64_t seed,
                                 const fs::path& out_png) {
  Model model = load_model(checkpoint);
  if (!model.decoder) {
    throw ProtocolError(std::string(name_of(model.kind())) + " checkpoints have no decoder to sample from");
  }
  const auto columns = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  auto write_grid = [&](GenerateLabel which, const fs::path& path) {
    const FTensor images = generate(model, n, which, seed);
    std::vector<Image> tiles;
    const std::size_t per = kImageChannels * kImageSize * kImageSize;
    for (std::size_t i = 0; i < n; ++i) {
      Image img(kImageSize, kImageSize);
      std::copy_n(images.values().begin() + static_cast<std::ptrdiff_t>(i * per), per, img.data.begin());
      tiles.push_back(std::move(img));
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_png(path, tile(tiles, columns));
    return path;
  };
  switch (label) {
    case SampleLabel::zero:
      return {write_grid(GenerateLabel::zero, out_png)};
    case SampleLabel::one:
      return {write_grid(GenerateLabel::one, out_png)};
    case SampleLabel::random:
      return {write_grid(GenerateLabel::random, out_png)};
    case SampleLabel::both: {
      const fs::path stem = out_png.parent_path() / out_png.stem();
      return {write_grid(GenerateLabel::zero, stem.string() + "_y0.png"),
              write_grid(GenerateLabel::one, stem.string() + "_y1.png")};
    }
  }
  throw ContractError("unknown sample label");
}

PreprocessSummary cmd_preprocess(const fs::path& image_dir, const fs::path& labels_csv, const fs::path& out_dir,
                                 const RunConfig& config, std::ostream* log) {
  IngestOptions options;
  options.remove_patches = true;
  IngestReport report = ingest(image_dir, labels_csv, options);
  std::ostream& out = sink(log);
  for (const auto& id : report.undecodable) out << "warning: could not decode " << id << '\n';
  for (const auto& id : report.rejected) out << "rejected (no usable skin rectangle): " << id << '\n';

  Splits splits = split(report.dataset, config.split);
  if (config.augment) {
    splits.labelled_train = augment(splits.labelled_train, config.split.seed);
    splits.unlabelled = augment(splits.unlabelled, config.split.seed);
  }
  DatasetManifestExtras extras{report.rejected, report.undecodable, config.split.seed, config.augment};
  write_dataset_dir(out_dir, splits, extras);

  PreprocessSummary summary{report.dataset.size(), report.rejected.size(), report.undecodable.size(),
                            sha256_file(out_dir / "manifest.json")};
  out << "ingested " << summary.ingested << ", rejected " << summary.rejected << ", undecodable "
      << summary.undecodable << '\n';
  return summary;
}

std::string cmd_synth_data(const RunConfig& config, const fs::path& out_dir) {
  RunConfig synth_only = config;
  synth_only.data_dir.clear();
  write_dataset_dir(out_dir, load_splits(synth_only),
                    DatasetManifestExtras{{}, {}, config.split.seed, config.augment});
  return sha256_file(out_dir / "manifest.json");
}

}  // namespace ssdaae
