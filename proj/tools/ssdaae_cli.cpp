#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssdaae/errors.hpp"
#include "ssdaae/harness.hpp"

using namespace ssdaae;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  std::string variant;
  std::optional<double> sigma;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::string synth;
  std::string data;
  std::string arch;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run config with flat dotted keys");
  cmd->add_option("--seed", f.seed, "Run seed");
  cmd->add_option("--out", f.out, "Output location (default under $SSDAAE_OUT or ./runs)");
  cmd->add_option("--set", f.overrides, "Override a config key: key=value (repeatable)");
  cmd->add_option("--variant", f.variant, "cnn, cnn+noise, saae, sdaae, ssaae or ssdaae");
  cmd->add_option("--sigma", f.sigma, "Corruption standard deviation");
  cmd->add_option("--epochs", f.epochs, "Training epochs");
  cmd->add_option("--batch-size", f.batch_size, "Minibatch size");
  cmd->add_option("--synth", f.synth, "Synthetic corpus, e.g. n=200 or n=2600,seed=3");
  cmd->add_option("--data", f.data, "Preprocessed dataset directory");
  cmd->add_option("--arch", f.arch, "Architecture preset: paper or desk");
}

// "n=200,seed=3": n is the total image count; the split becomes 40/40/10/10 %
// unless split.* keys are overridden afterwards.
void apply_synth(RunConfig& config, const std::string& spec) {
  std::size_t total = 0;
  std::stringstream in(spec);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("--synth expects key=value pairs, got '" + part + "'");
    const std::string key = part.substr(0, eq), value = part.substr(eq + 1);
    if (key == "n") {
      total = std::stoull(value);
    } else if (key == "seed") {
      config.synth.seed = std::stoull(value);
    } else {
      throw ConfigError("--synth: unknown key '" + key + "'");
    }
  }
  if (total < 2) throw ConfigError("--synth needs n >= 2");
  config.data_dir.clear();
  config.synth.n_per_class = total / 2;
  const std::size_t n = 2 * config.synth.n_per_class;
  config.split.n_val = n / 10;
  config.split.n_test = n / 10;
  config.split.n_labelled_train = (n - config.split.n_val - config.split.n_test) / 2;
  config.split.n_unlabelled = n - config.split.n_val - config.split.n_test - config.split.n_labelled_train;
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig config = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.variant.empty()) config.variant = parse_variant(f.variant);
  if (f.sigma) config.train.sigma = *f.sigma;
  if (f.epochs) config.train.epochs = *f.epochs;
  if (f.batch_size) config.train.batch_size = *f.batch_size;
  if (!f.arch.empty()) config.arch_preset = f.arch;
  if (!f.data.empty()) config.data_dir = f.data;
  if (!f.synth.empty()) apply_synth(config, f.synth);
  for (const auto& o : f.overrides) apply_override(config, o);
  if (f.seed) config.seed = *f.seed;
  if (!f.out.empty()) config.out = f.out;
  config.validate();
  return config;
}

void print_table(const std::vector<TableRow>& rows, const std::string& key) {
  std::cout << key << ",target,specificity\n";
  for (const auto& r : rows) std::cout << r.model << ',' << r.point.target << ',' << r.point.specificity << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised denoising adversarial autoencoders for skin lesion classification"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, ablate_f, sweep_f, sample_f, pre_f, synth_f;

  auto* train_cmd = app.add_subcommand("train", "Train one variant");
  add_common(train_cmd, train_f);
  std::string resume;
  train_cmd->add_option("--resume", resume, "Checkpoint directory to continue from");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval_cmd, eval_f);
  std::string eval_checkpoint, eval_split = "test";
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint directory")->required();
  eval_cmd->add_option("--split", eval_split, "test, val or labelled_train");

  auto* ablate_cmd = app.add_subcommand("ablate", "Train and compare all six variants");
  add_common(ablate_cmd, ablate_f);

  auto* sweep_cmd = app.add_subcommand("noise-sweep", "Train one ssdaae per corruption level");
  add_common(sweep_cmd, sweep_f);
  std::vector<double> sigmas;
  sweep_cmd->add_option("--sigmas", sigmas, "Corruption levels (default 0 0.01 0.05 0.1 0.25 0.5 1)");

  auto* sample_cmd = app.add_subcommand("sample", "Decode prior samples into a PNG grid");
  add_common(sample_cmd, sample_f);
  std::string sample_checkpoint, sample_label = "random";
  std::size_t sample_n = 16;
  sample_cmd->add_option("--checkpoint", sample_checkpoint, "Checkpoint directory")->required();
  sample_cmd->add_option("-n,--count", sample_n, "Number of samples");
  sample_cmd->add_option("--label", sample_label, "0, 1, random or both");

  auto* pre_cmd = app.add_subcommand("preprocess", "Ingest images, remove identifier patches, split");
  add_common(pre_cmd, pre_f);
  std::string images, labels;
  pre_cmd->add_option("--images", images, "Directory of PNG/JPEG images")->required();
  pre_cmd->add_option("--labels", labels, "CSV with header id,label");

  auto* synth_cmd = app.add_subcommand("synth-data", "Write the synthetic corpus as a dataset directory");
  add_common(synth_cmd, synth_f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      TrainOptions options;
      options.log = &std::cerr;
      if (!resume.empty()) options.resume = resume;
      const TrainOutcome outcome = cmd_train(resolve(train_f), options);
      std::cout << "run directory: " << outcome.run_dir.string() << "\n"
                << "step log sha256: " << outcome.step_log_sha256 << "\n";
    } else if (*eval_cmd) {
      RunConfig config = resolve(eval_f);
      if (eval_f.config.empty() && eval_f.data.empty() && eval_f.synth.empty()) {
        // Default to the data the checkpoint was trained on.
        RunConfig stored = read_checkpoint_info(eval_checkpoint).config;
        stored.threshold_split = config.threshold_split;
        config = stored;
      }
      const std::filesystem::path out = eval_f.out.empty() ? std::filesystem::path(eval_checkpoint) / "eval"
                                                            : std::filesystem::path(eval_f.out);
      const MetricsReport report = cmd_eval(eval_checkpoint, config, eval_split, out, &std::cerr);
      std::cout << "target,threshold,sensitivity,specificity\n";
      for (const auto& r : report.rows) {
        std::cout << r.target << ',' << r.threshold << ',' << r.sensitivity << ',' << r.specificity << '\n';
      }
      std::cout << "auc," << report.auc << '\n';
    } else if (*ablate_cmd) {
      print_table(cmd_ablate(resolve(ablate_f), &std::cerr), "variant");
    } else if (*sweep_cmd) {
      RunConfig config = resolve(sweep_f);
      if (!sigmas.empty()) config.sweep_sigmas = sigmas;
      print_table(cmd_noise_sweep(config, &std::cerr), "sigma");
    } else if (*sample_cmd) {
      SampleLabel label;
      if (sample_label == "0") {
        label = SampleLabel::zero;
      } else if (sample_label == "1") {
        label = SampleLabel::one;
      } else if (sample_label == "random") {
        label = SampleLabel::random;
      } else if (sample_label == "both") {
        label = SampleLabel::both;
      } else {
        throw ConfigError("--label must be 0, 1, random or both");
      }
      const std::uint64_t seed = sample_f.seed.value_or(0);
      const std::filesystem::path out =
          sample_f.out.empty() ? default_output_root() / "samples.png" : std::filesystem::path(sample_f.out);
      for (const auto& p : cmd_sample(sample_checkpoint, sample_n, label, seed, out)) {
        std::cout << p.string() << '\n';
      }
    } else if (*pre_cmd) {
      const RunConfig config = resolve(pre_f);
      const std::filesystem::path out =
          pre_f.out.empty() ? default_output_root() / "dataset" : std::filesystem::path(pre_f.out);
      const PreprocessSummary s = cmd_preprocess(images, labels, out, config, &std::cerr);
      std::cout << "ingested " << s.ingested << "\nrejected " << s.rejected << "\nundecodable " << s.undecodable
                << "\nmanifest sha256 " << s.manifest_sha256 << '\n';
    } else if (*synth_cmd) {
      const RunConfig config = resolve(synth_f);
      const std::filesystem::path out =
          synth_f.out.empty() ? default_output_root() / "synthetic" : std::filesystem::path(synth_f.out);
      std::cout << "manifest sha256 " << cmd_synth_data(config, out) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
