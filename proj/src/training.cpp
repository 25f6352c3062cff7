#include "ssdaae/training.hpp"

#include <algorithm>
#include <numeric>

#include "ssdaae/errors.hpp"

namespace ssdaae {

void LossWeights::validate() const {
  for (double v : {alpha, beta, eta, a, b}) {
    if (!(v >= 0.0)) throw ConfigError("loss weights must be non-negative");
  }
}

std::string_view name_of(TrainMode mode) {
  switch (mode) {
    case TrainMode::supervised:
      return "supervised";
    case TrainMode::semi_supervised:
      return "semi_supervised";
    case TrainMode::pretrain_then_finetune:
      return "pretrain_then_finetune";
  }
  throw ContractError("unknown train mode");
}

TrainMode parse_train_mode(std::string_view name) {
  for (TrainMode m : {TrainMode::supervised, TrainMode::semi_supervised, TrainMode::pretrain_then_finetune}) {
    if (name_of(m) == name) return m;
  }
  throw ConfigError("unknown training mode '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  weights.validate();
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(lr_autoencoder > 0.0) || !(lr_discriminator > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(momentum_autoencoder >= 0.0 && momentum_autoencoder < 1.0) ||
      !(momentum_discriminator >= 0.0 && momentum_discriminator < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  if (!(label_prior > 0.0 && label_prior < 1.0)) throw ConfigError("label_prior must lie in (0, 1)");
}

// ---------------------------------------------------------------------------

template <typename T>
Var<T> classification_loss(const Var<T>& prediction, const Var<T>& target, const LossWeights& w) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError("classification_loss: prediction " + to_string(prediction.shape()) + " vs target " +
                     to_string(target.shape()));
  }
  for (T p : prediction.values()) {
    if (!(p >= T{0} && p <= T{1})) throw DomainError("classification_loss: prediction outside [0,1]");
  }
  for (T y : target.values()) {
    if (y != T{0} && y != T{1}) throw DomainError("classification_loss: labels must be 0 or 1");
  }
  auto pos = scale(mul(target, clamped_log(prediction)), static_cast<T>(w.a));
  auto neg = scale(mul(add_scalar(negate(target), T{1}), clamped_log(add_scalar(negate(prediction), T{1}))),
                   static_cast<T>(w.b));
  return negate(mean(add(pos, neg)));
}

template <typename T>
Var<T> reconstruction_loss(const Var<T>& reconstruction, const Var<T>& clean) {
  return mse(reconstruction, clean);
}

template <typename T>
Var<T> discriminator_loss(const Var<T>& p_real, const Var<T>& p_fake) {
  if (p_real.shape().empty() || p_fake.shape().empty() || p_real.shape().back() != p_fake.shape().back()) {
    throw ShapeError("discriminator_loss: real " + to_string(p_real.shape()) + " vs fake " +
                     to_string(p_fake.shape()));
  }
  auto real_term = mean(clamped_log(p_real));
  auto fake_term = mean(clamped_log(add_scalar(negate(p_fake), T{1})));
  // Average of the two halves: binary cross-entropy over the pooled real and fake rows.
  return scale(add(real_term, fake_term), T{-0.5});
}

template <typename T>
Var<T> encoder_regularisation_loss(const Var<T>& p_fake) {
  return negate(mean(clamped_log(p_fake)));
}

template <typename T>
Var<T> encoder_combined_loss(const EncoderLossParts<T>& parts, const LossWeights& w) {
  w.validate();
  std::optional<Var<T>> total;
  auto accumulate = [&](const std::optional<Var<T>>& part, double coefficient) {
    if (!part) return;
    Var<T> term = scale(*part, static_cast<T>(coefficient));
    total = total ? add(*total, term) : term;
  };
  accumulate(parts.l_class, w.beta);
  accumulate(parts.l_rec, w.eta);
  accumulate(parts.l_reg_y, w.alpha);
  accumulate(parts.l_reg_z, w.alpha);
  if (!total) throw ContractError("encoder_combined_loss: no loss components");
  return *total;
}

template Var<float> classification_loss(const Var<float>&, const Var<float>&, const LossWeights&);
template Var<double> classification_loss(const Var<double>&, const Var<double>&, const LossWeights&);
template Var<float> reconstruction_loss(const Var<float>&, const Var<float>&);
template Var<double> reconstruction_loss(const Var<double>&, const Var<double>&);
template Var<float> discriminator_loss(const Var<float>&, const Var<float>&);
template Var<double> discriminator_loss(const Var<double>&, const Var<double>&);
template Var<float> encoder_regularisation_loss(const Var<float>&);
template Var<double> encoder_regularisation_loss(const Var<double>&);
template Var<float> encoder_combined_loss(const EncoderLossParts<float>&, const LossWeights&);
template Var<double> encoder_combined_loss(const EncoderLossParts<double>&, const LossWeights&);

FVar discriminator_loss(Discriminator& d, FTape& tape, const FTensor& real, const FTensor& fake) {
  FVar p_real = d.forward(tape, tape.constant(FTensor(real.shape(), real.values())));
  FVar p_fake = d.forward(tape, tape.constant(FTensor(fake.shape(), fake.values())));
  return discriminator_loss(p_real, p_fake);
}

// ---------------------------------------------------------------------------

namespace {

NamedParams<Scalar> concat(std::initializer_list<NamedParams<Scalar>> groups) {
  NamedParams<Scalar> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

void zero_all(Model& model) {
  for (auto& p : model.parameters()) p.second->zero_grad();
}

}  // namespace

Trainer::Trainer(Model& model, const TrainConfig& config)
    : model_(model), config_(config), rng_(mix_seed(config.seed, "trainer")) {
  config_.validate();
  const RMSPropOptions ae{config_.lr_autoencoder, config_.momentum_autoencoder};
  const RMSPropOptions disc{config_.lr_discriminator, config_.momentum_discriminator};
  if (model_.cnn) {
    autoencoder_ = RMSProp<Scalar>(model_.parameters(), ae);
    return;
  }
  autoencoder_ = RMSProp<Scalar>(concat({model_.trunk_parameters(), model_.label_head_parameters(),
                                         model_.latent_head_parameters(), model_.decoder_parameters()}),
                                 ae);
  latent_disc_ = RMSProp<Scalar>(model_.latent_disc_parameters(), disc);
  label_disc_ = RMSProp<Scalar>(model_.label_disc_parameters(), disc);
  regulariser_ = RMSProp<Scalar>(
      config_.regularise_label_head
          ? concat({model_.trunk_parameters(), model_.label_head_parameters(), model_.latent_head_parameters()})
          : concat({model_.trunk_parameters(), model_.latent_head_parameters()}),
      ae);
}

std::vector<std::pair<std::string, RMSProp<Scalar>*>> Trainer::optimizers() {
  if (model_.cnn) return {{"autoencoder", &autoencoder_}};
  return {{"autoencoder", &autoencoder_},
          {"latent_disc", &latent_disc_},
          {"label_disc", &label_disc_},
          {"regulariser", &regulariser_}};
}

void Trainer::check_batch(const DataBatch& batch) const {
  const Shape& s = batch.images.shape();
  if (s.size() != 4 || s[0] == 0 || s[1] != kImageChannels || s[2] != kImageSize || s[3] != kImageSize) {
    throw ShapeError("training batch must be [B x 3 x 64 x 64], got " + to_string(s));
  }
  if (batch.labels && batch.labels->shape() != Shape{s[0], 1}) {
    throw ShapeError("training labels must be [B x 1], got " + to_string(batch.labels->shape()));
  }
  if (!batch.labels && !model_.flags().unlabelled) {
    throw ProtocolError("unlabelled batch given to supervised variant " + std::string(name_of(model_.kind())));
  }
}

StepReport Trainer::step(const DataBatch& batch) {
  check_batch(batch);
  StepReport report;
  if (model_.cnn) {
    report = classifier_step(batch);
  } else {
    report.labelled = batch.labelled();
    PhaseContext ctx = autoencoder_phase(batch, report);
    discriminator_phase(ctx, report);
    regularisation_phase(ctx, report);
  }
  report.step = step_++;
  return report;
}

StepReport Trainer::classifier_step(const DataBatch& batch) {
  StepReport report;
  report.labelled = true;
  zero_all(model_);
  FTensor input = corrupt(batch.images, model_.corruption().sigma, rng_);
  FTape tape;
  FVar prediction = cnn_forward(model_, tape, tape.constant(std::move(input)));
  FVar loss = classification_loss(prediction, tape.constant(*batch.labels), config_.weights);
  tape.backward(loss);
  autoencoder_.step();
  report.l_class = loss.item();
  return report;
}

PhaseContext Trainer::autoencoder_phase(const DataBatch& batch, StepReport& report) {
  check_batch(batch);
  PhaseContext ctx;
  ctx.clean = FTensor(batch.images.shape(), batch.images.values());
  ctx.corrupted = corrupt(batch.images, model_.corruption().sigma, rng_);
  ctx.labels = batch.labels;

  zero_all(model_);
  FreezeGuard frozen(concat({model_.latent_disc_parameters(), model_.label_disc_parameters()}));
  FTape tape;
  FVar noisy = tape.constant(FTensor(ctx.corrupted.shape(), ctx.corrupted.values()));
  FVar clean = tape.constant(FTensor(ctx.clean.shape(), ctx.clean.values()));
  Encoding enc = encode(model_, tape, noisy);
  FVar reconstruction = decode(model_, tape, enc.label, enc.code);

  EncoderLossParts<Scalar> parts;
  parts.l_rec = reconstruction_loss(reconstruction, clean);
  if (batch.labels) {
    parts.l_class = classification_loss(enc.label, tape.constant(*batch.labels), config_.weights);
  }
  parts.l_reg_z = encoder_regularisation_loss(discriminate(*model_.latent_disc, tape, enc.code));
  parts.l_reg_y = encoder_regularisation_loss(discriminate(*model_.label_disc, tape, enc.label));
  FVar loss = encoder_combined_loss(parts, config_.weights);
  tape.backward(loss);
  autoencoder_.step();

  if (parts.l_class) report.l_class = parts.l_class->item();
  report.l_rec = parts.l_rec->item();
  report.l_reg_z = parts.l_reg_z->item();
  report.l_reg_y = parts.l_reg_y->item();
  report.l_encoder = loss.item();
  ctx.codes = enc.code.to_tensor();
  ctx.label_pred = enc.label.to_tensor();
  return ctx;
}

void Trainer::discriminator_phase(const PhaseContext& ctx, StepReport& report) {
  const std::size_t batch = ctx.codes.dim(0);
  zero_all(model_);
  FreezeGuard frozen(concat({model_.trunk_parameters(), model_.label_head_parameters(),
                             model_.latent_head_parameters(), model_.decoder_parameters()}));
  {
    FTape tape;
    FTensor real = sample_prior(PriorKind::latent, batch, rng_, model_.arch().latent);
    FVar loss = discriminator_loss(*model_.latent_disc, tape, real, ctx.codes);
    tape.backward(loss);
    latent_disc_.step();
    report.l_disc_z = loss.item();
  }
  {
    FTape tape;
    FTensor real = sample_prior(PriorKind::label, batch, rng_, 1, config_.label_prior);
    FVar loss = discriminator_loss(*model_.label_disc, tape, real, ctx.label_pred);
    tape.backward(loss);
    label_disc_.step();
    report.l_disc_y = loss.item();
  }
}

void Trainer::regularisation_phase(const PhaseContext& ctx, StepReport&) {
  zero_all(model_);
  NamedParams<Scalar> frozen_params =
      concat({model_.latent_disc_parameters(), model_.label_disc_parameters(), model_.decoder_parameters()});
  if (!config_.regularise_label_head) {
    auto head = model_.label_head_parameters();
    frozen_params.insert(frozen_params.end(), head.begin(), head.end());
  }
  FreezeGuard frozen(std::move(frozen_params));
  FTape tape;
  Encoding enc = encode(model_, tape, tape.constant(FTensor(ctx.corrupted.shape(), ctx.corrupted.values())));
  FVar reg = add(encoder_regularisation_loss(discriminate(*model_.latent_disc, tape, enc.code)),
                 encoder_regularisation_loss(discriminate(*model_.label_disc, tape, enc.label)));
  FVar loss = scale(reg, static_cast<Scalar>(config_.weights.alpha));
  tape.backward(loss);
  regulariser_.step();
}

// ---------------------------------------------------------------------------

namespace {

class IndexStream {
 public:
  IndexStream(std::size_t n, Rng& rng) : order_(n), rng_(rng) { reshuffle(); }
  IndexStream(std::vector<std::size_t> order, std::size_t pos, Rng& rng)
      : order_(std::move(order)), rng_(rng), pos_(pos) {}

  std::vector<std::size_t> next(std::size_t count) {
    std::vector<std::size_t> out;
    count = std::min(count, order_.size());
    while (out.size() < count) {
      if (pos_ == order_.size()) reshuffle();
      out.push_back(order_[pos_++]);
    }
    return out;
  }

  const std::vector<std::size_t>& order() const { return order_; }
  std::size_t pos() const { return pos_; }

 private:
  void reshuffle() {
    std::iota(order_.begin(), order_.end(), 0);
    std::shuffle(order_.begin(), order_.end(), rng_.engine());
    pos_ = 0;
  }

  std::vector<std::size_t> order_;
  Rng& rng_;
  std::size_t pos_ = 0;
};

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch)));
  }
  return out;
}

class ReportMean {
 public:
  void add(const StepReport& r) {
    ++steps_;
    push(0, r.l_class);
    push(1, r.l_rec);
    push(2, r.l_reg_z);
    push(3, r.l_reg_y);
    push(4, r.l_disc_z);
    push(5, r.l_disc_y);
    push(6, r.l_encoder);
  }

  StepReport mean() const {
    StepReport out;
    std::optional<double>* fields[] = {&out.l_class,  &out.l_rec,    &out.l_reg_z,  &out.l_reg_y,
                                       &out.l_disc_z, &out.l_disc_y, &out.l_encoder};
    for (std::size_t i = 0; i < 7; ++i) {
      if (count_[i]) *fields[i] = sum_[i] / static_cast<double>(count_[i]);
    }
    out.step = steps_;
    return out;
  }
  std::size_t steps() const { return steps_; }

 private:
  void push(std::size_t i, const std::optional<double>& v) {
    if (!v) return;
    sum_[i] += *v;
    ++count_[i];
  }
  double sum_[7] = {};
  std::size_t count_[7] = {};
  std::size_t steps_ = 0;
};

bool better(const MetricsReport& candidate, const std::optional<MetricsReport>& best) {
  if (!best) return true;
  const double a = candidate.at(kSelectionSensitivity).specificity;
  const double b = best->at(kSelectionSensitivity).specificity;
  if (a != b) return a > b;
  return candidate.auc > best->auc;
}

}  // namespace

TrainResult train(Model& model, const TrainingSplits& data, const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (!data.labelled || data.labelled->empty()) throw ConfigError("labelled training split is empty");
  if (data.labelled->labelled_count() != data.labelled->size()) {
    throw ConfigError("labelled training split contains unlabelled images");
  }
  const VariantFlags flags = model.flags();
  const bool semi = flags.unlabelled && config.mode != TrainMode::supervised;
  if (semi && (!data.unlabelled || data.unlabelled->empty())) {
    throw ConfigError(std::string(name_of(model.kind())) + " needs a non-empty unlabelled split");
  }
  if (data.validation) {
    const std::size_t pos = static_cast<std::size_t>(
        std::count(data.validation->labels.begin(), data.validation->labels.end(), std::optional<int>(1)));
    if (data.validation->labelled_count() != data.validation->size() || pos == 0 ||
        pos == data.validation->size()) {
      throw ConfigError("validation split must be fully labelled and contain both classes");
    }
  }

  Trainer trainer(model, config);
  Rng order_rng(mix_seed(config.seed, "order"));
  Dataset unlabelled_only;
  if (semi) unlabelled_only = data.unlabelled->without_labels();

  LoopState state;
  state.best_parameters = model.snapshot();
  if (semi) {
    IndexStream fresh(unlabelled_only.size(), order_rng);
    state.stream_order = fresh.order();
  }
  state.order_rng = order_rng.state();
  if (hooks.on_start) hooks.on_start(trainer, state);
  order_rng.restore(state.order_rng);
  std::optional<IndexStream> unlabelled_stream;
  if (semi) {
    if (state.stream_order.size() != unlabelled_only.size() || state.stream_pos > unlabelled_only.size()) {
      throw ConfigError("resume state does not match the unlabelled split");
    }
    unlabelled_stream.emplace(state.stream_order, state.stream_pos, order_rng);
  }

  const std::size_t pretrain =
      semi && config.mode == TrainMode::pretrain_then_finetune ? config.pretrain_epochs : 0;
  TrainResult result;

  auto run = [&](const DataBatch& batch, ReportMean& acc) {
    StepReport r = trainer.step(batch);
    acc.add(r);
    if (hooks.on_step) hooks.on_step(r);
  };

  for (std::size_t e = state.epochs_done; e < pretrain + config.epochs; ++e) {
    const bool pretraining = e < pretrain;
    ReportMean acc;
    if (pretraining) {
      for (const auto& idx : epoch_batches(unlabelled_only.size(), config.batch_size, order_rng)) {
        run(unlabelled_only.batch(idx), acc);
      }
    } else {
      for (const auto& idx : epoch_batches(data.labelled->size(), config.batch_size, order_rng)) {
        run(data.labelled->batch(idx), acc);
        if (semi) run(unlabelled_only.batch(unlabelled_stream->next(config.batch_size)), acc);
      }
    }

    EpochSummary summary;
    summary.epoch = e + 1;
    summary.pretraining = pretraining;
    summary.steps = acc.steps();
    summary.mean = acc.mean();
    if (data.validation) summary.validation = evaluate(model, *data.validation, "val");
    if (!pretraining && (!data.validation || better(*summary.validation, state.best_validation))) {
      state.best_parameters = model.snapshot();
      state.best_epoch = summary.epoch;
      state.best_validation = summary.validation;
    }
    state.epochs_done = e + 1;
    state.order_rng = order_rng.state();
    if (unlabelled_stream) {
      state.stream_order = unlabelled_stream->order();
      state.stream_pos = unlabelled_stream->pos();
    }
    result.epochs.push_back(summary);
    if (hooks.on_epoch) hooks.on_epoch(summary, trainer, state);
  }

  result.best_parameters = state.best_parameters;
  result.best_epoch = state.best_epoch;
  result.best_validation = state.best_validation;
  model.restore(result.best_parameters);
  return result;
}

ScoredSet score(Model& model, const Dataset& data, const std::string& split_name) {
  if (data.labelled_count() != data.size()) {
    throw ProtocolError("evaluation split '" + split_name + "' contains unlabelled images");
  }
  ScoredSet set;
  set.split = split_name;
  set.ids = data.ids;
  for (Scalar s : predict(model, data.images)) set.scores.push_back(static_cast<double>(s));
  for (const auto& l : data.labels) set.labels.push_back(*l);
  return set;
}

MetricsReport evaluate(Model& model, const Dataset& data, const std::string& split_name,
                       std::span<const double> targets) {
  return make_report(score(model, data, split_name), targets);
}

}  // namespace ssdaae
