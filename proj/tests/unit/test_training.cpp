#include <doctest.h>

#include <cmath>

#include "ssdaae/errors.hpp"
#include "ssdaae/training.hpp"
#include "support/oracles.hpp"

using namespace ssdaae;
using oracle::DTape;
using oracle::DTensor;
using oracle::DVar;

namespace {

Splits small_splits(std::uint64_t seed = 1) {
  Dataset all = synth_generate({40, seed});
  return split(all, {30, 30, 10, 10, seed});
}

TrainConfig quick_config(std::uint64_t seed = 0) {
  TrainConfig c;
  c.epochs = 1;
  c.batch_size = 8;
  c.seed = seed;
  return c;
}

bool all_zero(const NamedParams<Scalar>& params) {
  for (const auto& p : params)
    for (float g : p.second->grad())
      if (g != 0.0f) return false;
  return true;
}

bool any_nonzero(const NamedParams<Scalar>& params) {
  for (const auto& p : params)
    for (float g : p.second->grad())
      if (g != 0.0f) return true;
  return false;
}

std::vector<FTensor> values_of(const NamedParams<Scalar>& params) {
  std::vector<FTensor> out;
  for (const auto& p : params) out.emplace_back(p.second->shape(), p.second->values());
  return out;
}

bool same_values(const std::vector<FTensor>& a, const NamedParams<Scalar>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].values() != b[i].second->values()) return false;
  return true;
}

bool same_reports(const StepReport& a, const StepReport& b) {
  return a.step == b.step && a.labelled == b.labelled && a.l_class == b.l_class && a.l_rec == b.l_rec &&
         a.l_reg_z == b.l_reg_z && a.l_reg_y == b.l_reg_y && a.l_disc_z == b.l_disc_z && a.l_disc_y == b.l_disc_y &&
         a.l_encoder == b.l_encoder;
}

}  // namespace

TEST_CASE("default hyperparameters") {
  TrainConfig c;
  CHECK(c.lr_autoencoder == 1e-4);
  CHECK(c.lr_discriminator == 1e-4);
  CHECK(c.momentum_autoencoder == 0.0);
  CHECK(c.momentum_discriminator == 0.2);
  CHECK(c.weights == LossWeights{0.1, 1.0, 0.1, 9.0, 1.0});
  CHECK_THROWS_AS((LossWeights{-0.1, 1, 0.1, 9, 1}.validate()), ConfigError);
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_train_mode(name_of(TrainMode::pretrain_then_finetune)) == TrainMode::pretrain_then_finetune);
  CHECK_THROWS_AS(parse_train_mode("joint"), ConfigError);
}

TEST_CASE("classification loss examples") {
  DTape tape;
  LossWeights w;
  CHECK(classification_loss(tape.scalar(0.5), tape.scalar(1.0), w).item() ==
        doctest::Approx(9.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(classification_loss(tape.scalar(0.5), tape.scalar(1.0), w).item() == doctest::Approx(6.2383).epsilon(1e-4));
  CHECK(classification_loss(tape.constant(Shape{2, 1}, {1.0, 0.0}), tape.constant(Shape{2, 1}, {1.0, 0.0}), w).item() <
        1e-9);

  LossWeights unit{0.1, 1, 0.1, 1, 1};
  std::mt19937_64 gen(3);
  for (int i = 0; i < 20; ++i) {
    DTensor p = oracle::random_tensor({6, 1}, gen, 0.02, 0.98);
    std::vector<double> y(6);
    for (auto& v : y) v = gen() % 2;
    CHECK(classification_loss(tape.constant(p), tape.constant(Shape{6, 1}, y), unit).item() ==
          doctest::Approx(bce(tape.constant(p), tape.constant(Shape{6, 1}, y)).item()).epsilon(1e-12));
    std::vector<double> ones(6, 1.0);
    CHECK(classification_loss(tape.constant(p), tape.constant(Shape{6, 1}, ones), w).item() ==
          doctest::Approx(9.0 * bce(tape.constant(p), tape.constant(Shape{6, 1}, ones)).item()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(classification_loss(tape.scalar(1.5), tape.scalar(1.0), w), DomainError);
  CHECK_THROWS_AS(classification_loss(tape.scalar(0.5), tape.scalar(0.5), w), DomainError);
  CHECK_THROWS_AS(classification_loss(tape.constant(Shape{2}, {0.5, 0.5}), tape.scalar(1.0), w), ShapeError);
}

TEST_CASE("reconstruction, discriminator and regularisation examples") {
  DTape tape;
  CHECK(reconstruction_loss(tape.constant(DTensor(Shape{2, 3}, 0.5)), tape.constant(DTensor(Shape{2, 3}, 0.0))).item() ==
        0.25);
  CHECK(reconstruction_loss(tape.constant(Shape{2}, {0.1, 0.2}), tape.constant(Shape{2}, {0.1, 0.2})).item() == 0.0);
  CHECK_THROWS_AS(reconstruction_loss(tape.constant(DTensor(Shape{2})), tape.constant(DTensor(Shape{3}))), ShapeError);

  const DTensor half(Shape{4, 1}, 0.5);
  CHECK(discriminator_loss(tape.constant(half), tape.constant(half)).item() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(encoder_regularisation_loss(tape.constant(half)).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const double separated =
      discriminator_loss(tape.constant(DTensor(Shape{4, 1}, 1.0)), tape.constant(DTensor(Shape{4, 1}, 0.0))).item();
  CHECK(separated >= 0.0);
  CHECK(separated < 1e-9);
  CHECK(encoder_regularisation_loss(tape.constant(DTensor(Shape{3, 1}, 1.0))).item() == 0.0);
  CHECK_THROWS_AS(discriminator_loss(tape.constant(DTensor(Shape{4, 1}, 0.5)), tape.constant(DTensor(Shape{4, 2}, 0.5))),
                  ShapeError);
}

TEST_CASE("combined loss examples") {
  DTape tape;
  LossWeights w;
  EncoderLossParts<double> parts{tape.scalar(1.0), tape.scalar(1.0), tape.scalar(1.0), tape.scalar(1.0)};
  CHECK(encoder_combined_loss(parts, w).item() == doctest::Approx(1.3).epsilon(1e-15));

  LossWeights rec_only{0.0, 0.0, 0.1, 9, 1};
  EncoderLossParts<double> p2{tape.scalar(3.0), tape.scalar(2.0), tape.scalar(5.0), tape.scalar(7.0)};
  CHECK(encoder_combined_loss(p2, rec_only).item() == doctest::Approx(0.2).epsilon(1e-15));

  EncoderLossParts<double> unlabelled{std::nullopt, tape.scalar(2.0), tape.scalar(1.0), tape.scalar(1.0)};
  CHECK(encoder_combined_loss(unlabelled, w).item() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(encoder_combined_loss(EncoderLossParts<double>{}, w), ContractError);
  CHECK_THROWS_AS(encoder_combined_loss(parts, LossWeights{0.1, -1, 0.1, 9, 1}), ConfigError);
}

TEST_CASE("losses are non-negative on random inputs") {
  std::mt19937_64 gen(8);
  DTape tape;
  for (int i = 0; i < 50; ++i) {
    DTensor p = oracle::random_tensor({5, 1}, gen, 0.0, 1.0), q = oracle::random_tensor({5, 1}, gen, 0.0, 1.0);
    std::vector<double> y(5);
    for (auto& v : y) v = gen() % 2;
    CHECK(classification_loss(tape.constant(p), tape.constant(Shape{5, 1}, y), LossWeights{}).item() >= 0.0);
    CHECK(discriminator_loss(tape.constant(p), tape.constant(q)).item() >= 0.0);
    CHECK(encoder_regularisation_loss(tape.constant(p)).item() >= 0.0);
    CHECK(reconstruction_loss(tape.constant(p), tape.constant(q)).item() >= 0.0);
  }
}

TEST_CASE("loss gradients match finite differences") {
  double worst = 0;
  LossWeights w;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(static_cast<std::uint64_t>(seed) + 1000);
    DTensor p = oracle::random_tensor({6, 1}, gen, 0.05, 0.95), q = oracle::random_tensor({6, 1}, gen, 0.05, 0.95);
    DTensor x = oracle::random_tensor({2, 5}, gen), xr = oracle::random_tensor({2, 5}, gen);
    std::vector<double> y(6);
    for (auto& v : y) v = gen() % 2;
    worst = std::max(worst, oracle::check_gradients({&p}, [&](DTape& t, std::vector<DVar>& v) {
                              return classification_loss(v[0], t.constant(Shape{6, 1}, y), w);
                            }).max_rel_error);
    worst = std::max(worst, oracle::check_gradients({&p, &q}, [&](DTape&, std::vector<DVar>& v) {
                              return discriminator_loss(v[0], v[1]);
                            }).max_rel_error);
    worst = std::max(worst, oracle::check_gradients({&q}, [&](DTape&, std::vector<DVar>& v) {
                              return encoder_regularisation_loss(v[0]);
                            }).max_rel_error);
    worst = std::max(worst, oracle::check_gradients({&x, &xr}, [&](DTape&, std::vector<DVar>& v) {
                              return reconstruction_loss(v[0], v[1]);
                            }).max_rel_error);
    worst = std::max(worst, oracle::check_gradients({&p, &q, &x, &xr}, [&](DTape& t, std::vector<DVar>& v) {
                              EncoderLossParts<double> parts{classification_loss(v[0], t.constant(Shape{6, 1}, y), w),
                                                             reconstruction_loss(v[2], v[3]),
                                                             encoder_regularisation_loss(v[0]),
                                                             encoder_regularisation_loss(v[1])};
                              return encoder_combined_loss(parts, w);
                            }).max_rel_error);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("malignant gradient is a/b times the benign one") {
  // p = 0.3 for the malignant row and 0.7 for the benign row give equal |d bce / d p| = 1/0.3.
  DTensor p(Shape{2, 1}, std::vector<double>{0.3, 0.7});
  p.set_requires_grad(true);
  DTape tape;
  tape.backward(classification_loss(tape.leaf(p), tape.constant(Shape{2, 1}, {1.0, 0.0}), LossWeights{}));
  CHECK(std::abs(p.grad()[0]) / std::abs(p.grad()[1]) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(p.grad()[0] < 0.0);
  CHECK(p.grad()[1] > 0.0);
}

TEST_CASE("step reports carry exactly the terms of each variant") {
  const Splits s = small_splits();
  std::vector<std::size_t> idx{0, 1, 2, 3};
  const DataBatch labelled = s.labelled_train.batch(idx);
  const DataBatch unlabelled = s.unlabelled.without_labels().batch(idx);

  for (VariantKind k : {VariantKind::cnn, VariantKind::cnn_noise}) {
    Model m(k, ArchConfig::desk(), 0.1, 1);
    Trainer t(m, quick_config());
    StepReport r = t.step(labelled);
    CHECK(r.l_class.has_value());
    CHECK_FALSE((r.l_rec || r.l_reg_z || r.l_reg_y || r.l_disc_z || r.l_disc_y || r.l_encoder));
    CHECK_THROWS_AS(t.step(unlabelled), ProtocolError);
  }
  for (VariantKind k : {VariantKind::saae, VariantKind::sdaae, VariantKind::ssaae, VariantKind::ssdaae}) {
    CAPTURE(name_of(k));
    Model m(k, ArchConfig::desk(), 0.1, 1);
    Trainer t(m, quick_config());
    StepReport r = t.step(labelled);
    CHECK((r.l_class && r.l_rec && r.l_reg_z && r.l_reg_y && r.l_disc_z && r.l_disc_y && r.l_encoder));
    CHECK(r.labelled);
    if (flags_of(k).unlabelled) {
      StepReport u = t.step(unlabelled);
      CHECK_FALSE(u.l_class.has_value());
      CHECK((u.l_rec && u.l_reg_z && u.l_reg_y && u.l_disc_z && u.l_disc_y && u.l_encoder));
      CHECK(u.step == 1);
    } else {
      CHECK_THROWS_AS(t.step(unlabelled), ProtocolError);
    }
  }
}

TEST_CASE("training batch shape checks") {
  Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, 1);
  Trainer t(m, quick_config());
  DataBatch bad;
  bad.images = FTensor(Shape{2, 3, 32, 32});
  bad.ids = {"a", "b"};
  CHECK_THROWS_AS(t.step(bad), ShapeError);
  DataBatch bad_labels;
  bad_labels.images = FTensor(Shape{2, 3, 64, 64});
  bad_labels.labels = FTensor(Shape{3, 1});
  bad_labels.ids = {"a", "b"};
  CHECK_THROWS_AS(t.step(bad_labels), ShapeError);
}

TEST_CASE("phases update only their own parameter groups") {
  const Splits s = small_splits();
  std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5};
  const DataBatch batch = s.labelled_train.batch(idx);
  Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, 2);
  Trainer t(m, quick_config());
  auto encoder_side = [&] {
    auto p = m.trunk_parameters();
    auto h = m.label_head_parameters(), z = m.latent_head_parameters(), d = m.decoder_parameters();
    p.insert(p.end(), h.begin(), h.end());
    p.insert(p.end(), z.begin(), z.end());
    p.insert(p.end(), d.begin(), d.end());
    return p;
  };
  auto discs = [&] {
    auto p = m.latent_disc_parameters(), q = m.label_disc_parameters();
    p.insert(p.end(), q.begin(), q.end());
    return p;
  };

  StepReport report;
  const auto discs_before = values_of(discs());
  PhaseContext ctx = t.autoencoder_phase(batch, report);
  CHECK(same_values(discs_before, discs()));
  CHECK(all_zero(discs()));
  CHECK(any_nonzero(m.decoder_parameters()));
  CHECK(any_nonzero(m.trunk_parameters()));

  const auto enc_before = values_of(encoder_side());
  t.discriminator_phase(ctx, report);
  CHECK(all_zero(encoder_side()));
  CHECK(same_values(enc_before, encoder_side()));
  CHECK_FALSE(same_values(discs_before, discs()));
  CHECK(any_nonzero(discs()));

  const auto discs_mid = values_of(discs());
  const auto decoder_before = values_of(m.decoder_parameters());
  const auto trunk_before = values_of(m.trunk_parameters());
  t.regularisation_phase(ctx, report);
  CHECK(all_zero(discs()));
  CHECK(same_values(discs_mid, discs()));
  CHECK(same_values(decoder_before, m.decoder_parameters()));
  CHECK_FALSE(same_values(trunk_before, m.trunk_parameters()));
  CHECK(any_nonzero(m.label_head_parameters()));
}

TEST_CASE("regularisation can leave the label head alone") {
  const Splits s = small_splits();
  std::vector<std::size_t> idx{0, 1, 2, 3};
  Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, 2);
  TrainConfig c = quick_config();
  c.regularise_label_head = false;
  Trainer t(m, c);
  StepReport report;
  PhaseContext ctx = t.autoencoder_phase(s.labelled_train.batch(idx), report);
  t.discriminator_phase(ctx, report);
  const auto head = values_of(m.label_head_parameters());
  t.regularisation_phase(ctx, report);
  CHECK(same_values(head, m.label_head_parameters()));
  CHECK(all_zero(m.label_head_parameters()));
}

TEST_CASE("reconstruction is measured against the clean images") {
  const Splits s = small_splits();
  std::vector<std::size_t> idx{0, 1, 2, 3};
  const DataBatch batch = s.labelled_train.batch(idx);
  Model m(VariantKind::sdaae, ArchConfig::desk(), 0.25, 4);
  Model twin(VariantKind::sdaae, ArchConfig::desk(), 0.25, 4);
  TrainConfig c = quick_config(9);
  Trainer t(m, c);
  StepReport report;
  PhaseContext ctx = t.autoencoder_phase(batch, report);
  CHECK(ctx.clean.values() == batch.images.values());
  CHECK(ctx.corrupted.values() != batch.images.values());

  FTape tape(false);
  Encoding enc = encode(twin, tape, tape.constant(FTensor(ctx.corrupted.shape(), ctx.corrupted.values())));
  FVar rec = decode(twin, tape, enc.label, enc.code);
  const double vs_clean = reconstruction_loss(rec, tape.constant(FTensor(ctx.clean.shape(), ctx.clean.values()))).item();
  const double vs_noisy =
      reconstruction_loss(rec, tape.constant(FTensor(ctx.corrupted.shape(), ctx.corrupted.values()))).item();
  CHECK(*report.l_rec == doctest::Approx(vs_clean).epsilon(1e-6));
  CHECK(std::abs(vs_clean - vs_noisy) > 1e-3);
}

TEST_CASE("logged encoder loss equals the weighted sum of its parts") {
  const Splits s = small_splits();
  Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, 5);
  TrainConfig c = quick_config(5);
  c.epochs = 2;
  std::size_t checked = 0;
  TrainHooks hooks;
  hooks.on_step = [&](const StepReport& r) {
    const LossWeights& w = c.weights;
    const double expected =
        w.beta * r.l_class.value_or(0.0) + w.eta * *r.l_rec + w.alpha * (*r.l_reg_y + *r.l_reg_z);
    CHECK(std::abs(*r.l_encoder - expected) <= 1e-6 * std::abs(expected));
    ++checked;
  };
  TrainingSplits data{&s.labelled_train, &s.unlabelled, nullptr};
  train(m, data, c, hooks);
  // 30 labelled images in batches of 8 gives 4 labelled and 4 unlabelled steps per epoch.
  CHECK(checked == 16);
}

TEST_CASE("identical seeds give bit-identical step sequences") {
  const Splits s = small_splits();
  auto run = [&](std::uint64_t seed) {
    Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, seed);
    std::vector<StepReport> log;
    TrainHooks hooks;
    hooks.on_step = [&](const StepReport& r) { log.push_back(r); };
    train(m, {&s.labelled_train, &s.unlabelled, &s.val}, quick_config(seed), hooks);
    return std::make_pair(log, m.snapshot());
  };
  auto [a, pa] = run(3);
  auto [b, pb] = run(3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_reports(a[i], b[i]));
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].values() == pb[i].values());
  auto [c, pc] = run(4);
  CHECK_FALSE(same_reports(a[0], c[0]));
}

TEST_CASE("zero epochs return the initial parameters") {
  const Splits s = small_splits();
  Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, 6);
  const auto before = m.snapshot();
  TrainConfig c = quick_config();
  c.epochs = 0;
  TrainResult r = train(m, {&s.labelled_train, &s.unlabelled, &s.val}, c);
  CHECK(r.best_epoch == 0);
  CHECK(r.epochs.empty());
  const auto after = m.snapshot();
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i].values() == before[i].values());
}

TEST_CASE("train configuration errors") {
  const Splits s = small_splits();
  Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, 6);
  Dataset empty;
  CHECK_THROWS_AS(train(m, {&empty, &s.unlabelled, nullptr}, quick_config()), ConfigError);
  CHECK_THROWS_AS(train(m, {&s.labelled_train, nullptr, nullptr}, quick_config()), ConfigError);
  CHECK_THROWS_AS(train(m, {&s.labelled_train, &empty, nullptr}, quick_config()), ConfigError);
  const Dataset stripped = s.unlabelled.without_labels();
  CHECK_THROWS_AS(train(m, {&stripped, &s.unlabelled, nullptr}, quick_config()), ConfigError);

  Dataset one_class;
  for (std::size_t i = 0; i < s.val.size(); ++i)
    if (s.val.labels[i] == 1) one_class.append(s.val.ids[i], 1, s.val.pixels(i));
  CHECK_THROWS_AS(train(m, {&s.labelled_train, &s.unlabelled, &one_class}, quick_config()), ConfigError);

  // A supervised variant ignores the unlabelled split, and semi variants in supervised mode do too.
  Model sup(VariantKind::saae, ArchConfig::desk(), 0.0, 6);
  CHECK_NOTHROW(train(sup, {&s.labelled_train, nullptr, nullptr}, quick_config()));
  TrainConfig supervised = quick_config();
  supervised.mode = TrainMode::supervised;
  CHECK_NOTHROW(train(m, {&s.labelled_train, nullptr, nullptr}, supervised));
}

TEST_CASE("evaluation rejects unlabelled data") {
  const Splits s = small_splits();
  Model m(VariantKind::cnn, ArchConfig::desk(), 0.0, 1);
  CHECK_THROWS_AS(evaluate(m, s.unlabelled.without_labels()), ProtocolError);
  const MetricsReport r = evaluate(m, s.val, "val");
  CHECK(r.rows.size() == 4);
  CHECK(r.split == "val");
}

TEST_CASE("model selection keeps the best validation epoch") {
  const Splits s = small_splits(2);
  Model m(VariantKind::cnn, ArchConfig::desk(), 0.0, 7);
  TrainConfig c = quick_config(7);
  c.epochs = 4;
  c.lr_autoencoder = 1e-3;
  std::vector<std::vector<FTensor>> per_epoch;
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochSummary&, Trainer& t, const LoopState&) { per_epoch.push_back(t.model().snapshot()); };
  TrainResult r = train(m, {&s.labelled_train, nullptr, &s.val}, c, hooks);
  REQUIRE(r.epochs.size() == 4);
  std::size_t best = 0;
  for (std::size_t e = 0; e < 4; ++e) {
    const auto& v = *r.epochs[e].validation;
    if (best == 0) {
      best = e + 1;
      continue;
    }
    const auto& b = *r.epochs[best - 1].validation;
    const double sv = v.at(0.95).specificity, sb = b.at(0.95).specificity;
    if (sv > sb || (sv == sb && v.auc > b.auc)) best = e + 1;
  }
  CHECK(r.best_epoch == best);
  const auto now = m.snapshot();
  for (std::size_t i = 0; i < now.size(); ++i) CHECK(now[i].values() == per_epoch[best - 1][i].values());
}

TEST_CASE("pretraining epochs use unlabelled batches only") {
  const Splits s = small_splits();
  Model m(VariantKind::ssdaae, ArchConfig::desk(), 0.1, 8);
  TrainConfig c = quick_config(8);
  c.mode = TrainMode::pretrain_then_finetune;
  c.pretrain_epochs = 1;
  std::vector<StepReport> log;
  TrainHooks hooks;
  hooks.on_step = [&](const StepReport& r) { log.push_back(r); };
  TrainResult r = train(m, {&s.labelled_train, &s.unlabelled, &s.val}, c, hooks);
  REQUIRE(r.epochs.size() == 2);
  CHECK(r.epochs[0].pretraining);
  CHECK_FALSE(r.epochs[1].pretraining);
  CHECK(r.best_epoch == 2);
  // 30 unlabelled images in batches of 8: four pretraining steps, then labelled/unlabelled alternation.
  for (std::size_t i = 0; i < 4; ++i) CHECK_FALSE(log[i].labelled);
  for (std::size_t i = 4; i < log.size(); ++i) CHECK(log[i].labelled == ((i - 4) % 2 == 0));
}

TEST_CASE("tiny cnn overfits eight images within 500 steps") {
  for (std::uint64_t seed : {1, 2, 3}) {
    CAPTURE(seed);
    const Splits s = small_splits(seed);
    Dataset eight;
    for (std::size_t i = 0; i < 8; ++i)
      eight.append(s.labelled_train.ids[i], s.labelled_train.labels[i], s.labelled_train.pixels(i));
    Model m(VariantKind::cnn, ArchConfig::desk(), 0.0, seed);
    TrainConfig c = quick_config(seed);
    c.epochs = 500;  // one full batch per epoch
    train(m, {&eight, nullptr, nullptr}, c);
    const ScoredSet scored = score(m, eight);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < 8; ++i) correct += (scored.scores[i] >= 0.5) == (scored.labels[i] == 1);
    CHECK(correct == 8);
  }
}
