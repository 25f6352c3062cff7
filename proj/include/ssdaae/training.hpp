#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssdaae/data.hpp"
#include "ssdaae/metrics.hpp"
#include "ssdaae/model.hpp"
#include "ssdaae/optim.hpp"

namespace ssdaae {

// Coefficients of the encoder objective
//   l_encoder = beta * l_class + eta * l_rec + alpha * (l_reg_y + l_reg_z)
// and the class weights of l_class (a for malignant, b for benign).
struct LossWeights {
  double alpha = 0.1;
  double beta = 1.0;
  double eta = 0.1;
  double a = 9.0;
  double b = 1.0;

  // Throws ConfigError on negative entries.
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

enum class TrainMode { supervised, semi_supervised, pretrain_then_finetune };
std::string_view name_of(TrainMode mode);
TrainMode parse_train_mode(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double lr_autoencoder = 1e-4;
  double lr_discriminator = 1e-4;
  double momentum_autoencoder = 0.0;
  double momentum_discriminator = 0.2;
  double sigma = 0.1;
  TrainMode mode = TrainMode::semi_supervised;
  std::uint64_t seed = 0;
  LossWeights weights;
  // Passes over the unlabelled split before labelled batches join
  // (pretrain_then_finetune only).
  std::size_t pretrain_epochs = 0;
  // Whether the regularisation phase also updates the label head.
  bool regularise_label_head = true;
  // P(label = 1) of the label prior.
  double label_prior = 0.5;

  void validate() const;
};

// Per-step loss record. Terms a variant does not use stay empty.
struct StepReport {
  std::size_t step = 0;
  bool labelled = false;
  std::optional<double> l_class;
  std::optional<double> l_rec;
  std::optional<double> l_reg_z;
  std::optional<double> l_reg_y;
  std::optional<double> l_disc_z;
  std::optional<double> l_disc_y;
  std::optional<double> l_encoder;
};

// ----- loss kernels (templated so they can be checked in double precision) --

// -mean(a y log p + b (1 - y) log(1 - p)) with clamped logs.
template <typename T>
Var<T> classification_loss(const Var<T>& prediction, const Var<T>& target, const LossWeights& w);
// Mean squared error against the clean images.
template <typename T>
Var<T> reconstruction_loss(const Var<T>& reconstruction, const Var<T>& clean);
// -(mean log T(real) + mean log(1 - T(fake))) / 2, from discriminator probabilities.
template <typename T>
Var<T> discriminator_loss(const Var<T>& p_real, const Var<T>& p_fake);
// -mean log T(fake): pushes encoder outputs towards being scored as prior samples.
template <typename T>
Var<T> encoder_regularisation_loss(const Var<T>& p_fake);

template <typename T>
struct EncoderLossParts {
  std::optional<Var<T>> l_class;  // absent for unlabelled batches
  std::optional<Var<T>> l_rec;
  std::optional<Var<T>> l_reg_y;
  std::optional<Var<T>> l_reg_z;
};
// Weighted sum of the parts present; at least one part is required.
template <typename T>
Var<T> encoder_combined_loss(const EncoderLossParts<T>& parts, const LossWeights& w);

// Discriminator step input: prior samples vs detached encoder outputs.
FVar discriminator_loss(Discriminator& d, FTape& tape, const FTensor& real, const FTensor& fake);

// ----- training -------------------------------------------------------------

// Intermediate state shared by the three phases of one autoencoder step.
struct PhaseContext {
  FTensor clean;
  FTensor corrupted;
  std::optional<FTensor> labels;
  FTensor codes;       // detached encoder codes from the autoencoder phase
  FTensor label_pred;  // detached label predictions
};

// Owns the optimizer states for one model and runs minibatch updates.
//
// Autoencoder variants, per batch:
//   1. autoencoder phase: minimise l_encoder over encoder, heads and decoder
//      (discriminators frozen);
//   2. discriminator phase: one RMSProp step per discriminator on detached codes;
//   3. regularisation phase: minimise alpha (l_reg_z + l_reg_y) over the encoder
//      (discriminators frozen).
// CNN variants run only the weighted classification step.
class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& config);

  StepReport step(const DataBatch& batch);

  // Individual phases, exposed for inspection.
  PhaseContext autoencoder_phase(const DataBatch& batch, StepReport& report);
  void discriminator_phase(const PhaseContext& ctx, StepReport& report);
  void regularisation_phase(const PhaseContext& ctx, StepReport& report);

  Model& model() { return model_; }
  const TrainConfig& config() const { return config_; }
  Rng& rng() { return rng_; }
  std::size_t steps_done() const { return step_; }
  void set_steps_done(std::size_t n) { step_ = n; }

  // Named optimizer states (autoencoder, latent_disc, label_disc, regulariser).
  std::vector<std::pair<std::string, RMSProp<Scalar>*>> optimizers();

 private:
  void check_batch(const DataBatch& batch) const;
  StepReport classifier_step(const DataBatch& batch);

  Model& model_;
  TrainConfig config_;
  Rng rng_;
  RMSProp<Scalar> autoencoder_;
  RMSProp<Scalar> latent_disc_;
  RMSProp<Scalar> label_disc_;
  RMSProp<Scalar> regulariser_;
  std::size_t step_ = 0;
};

struct TrainingSplits {
  const Dataset* labelled = nullptr;
  const Dataset* unlabelled = nullptr;
  const Dataset* validation = nullptr;
};

struct EpochSummary {
  std::size_t epoch = 0;  // 1-based, counting pretraining epochs
  bool pretraining = false;
  std::size_t steps = 0;
  StepReport mean;  // component means over the epoch's steps
  std::optional<MetricsReport> validation;
};

// Everything besides model and optimizer state that the epoch loop needs to
// continue exactly where it stopped.
struct LoopState {
  std::size_t epochs_done = 0;  // including pretraining epochs
  std::string order_rng;        // serialised data-order generator
  std::vector<std::size_t> stream_order;  // unlabelled stream permutation
  std::size_t stream_pos = 0;
  std::size_t best_epoch = 0;
  std::optional<MetricsReport> best_validation;
  std::vector<FTensor> best_parameters;
};

struct TrainHooks {
  std::function<void(const StepReport&)> on_step;
  std::function<void(const EpochSummary&, Trainer&, const LoopState&)> on_epoch;
  // Called once before the first epoch; may overwrite trainer and loop state to resume.
  std::function<void(Trainer&, LoopState&)> on_start;
};

struct TrainResult {
  std::vector<FTensor> best_parameters;
  std::size_t best_epoch = 0;  // 0 = initial parameters
  std::optional<MetricsReport> best_validation;
  std::vector<EpochSummary> epochs;
};

// Validation score used for model selection.
inline constexpr double kSelectionSensitivity = 0.95;

// Supervised variants always train on labelled batches only. Semi-supervised
// variants alternate one labelled and one unlabelled batch; an epoch is one
// pass over the labelled split and the unlabelled stream cycles across epochs.
// The model is left holding the best parameters (by validation specificity at
// sensitivity 0.95, then AUC), or the final ones without a validation split.
TrainResult train(Model& model, const TrainingSplits& data, const TrainConfig& config,
                  const TrainHooks& hooks = {});

// Clean-input scores of a labelled dataset.
ScoredSet score(Model& model, const Dataset& data, const std::string& split_name = "");
// Throws ProtocolError if `data` contains unlabelled images.
MetricsReport evaluate(Model& model, const Dataset& data, const std::string& split_name = "",
                       std::span<const double> targets = kSensitivityTargets);

}  // namespace ssdaae
