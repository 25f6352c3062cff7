#include "ssdaae/model.hpp"

#include <algorithm>
#include <cctype>

#include "ssdaae/errors.hpp"

namespace ssdaae {

VariantFlags flags_of(VariantKind kind) {
  switch (kind) {
    case VariantKind::cnn:
      return {false, false, false};
    case VariantKind::cnn_noise:
      return {true, false, false};
    case VariantKind::saae:
      return {false, true, false};
    case VariantKind::sdaae:
      return {true, true, false};
    case VariantKind::ssaae:
      return {false, true, true};
    case VariantKind::ssdaae:
      return {true, true, true};
  }
  throw ContractError("unknown variant");
}

std::string_view name_of(VariantKind kind) {
  switch (kind) {
    case VariantKind::cnn:
      return "cnn";
    case VariantKind::cnn_noise:
      return "cnn+noise";
    case VariantKind::saae:
      return "saae";
    case VariantKind::sdaae:
      return "sdaae";
    case VariantKind::ssaae:
      return "ssaae";
    case VariantKind::ssdaae:
      return "ssdaae";
  }
  throw ContractError("unknown variant");
}

VariantKind parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "cnn_noise" || lower == "cnn-noise") return VariantKind::cnn_noise;
  for (VariantKind kind : kAllVariants) {
    if (name_of(kind) == lower) return kind;
  }
  throw ConfigError("unknown model variant '" + std::string(name) + "'");
}

FTensor corrupt(const FTensor& x, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ConfigError("corruption sigma must be non-negative");
  FTensor out(x.shape(), x.values());
  if (sigma == 0.0) return out;
  for (Scalar& v : out.values()) v += static_cast<Scalar>(rng.normal(0.0, sigma));
  return out;
}

FTensor corrupt(const FTensor& x, const CorruptionSpec& spec) {
  Rng rng(spec.seed);
  return corrupt(x, spec.sigma, rng);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kEncoderKernel = 5;
constexpr std::size_t kDecoderKernel = 3;
constexpr std::size_t kSeedExtent = 4;

void require_images(const FVar& images, const char* who) {
  const Shape& s = images.shape();
  if (s.size() != 4 || s[1] != kImageChannels || s[2] != kImageSize || s[3] != kImageSize) {
    throw ShapeError(std::string(who) + " expects [B x 3 x 64 x 64] images, got " + to_string(s));
  }
}

LayerInfo linear_info(const LinearSpec& s) {
  return {"linear", s.in_features, s.out_features, 0, 0, 0, 0, {s.out_features}};
}

LayerInfo act_info(const char* kind, Shape shape) { return {kind, 0, 0, 0, 0, 0, 0, std::move(shape)}; }

}  // namespace

Trunk::Trunk(const ArchConfig& arch) {
  std::size_t in = kImageChannels;
  for (std::size_t i = 0; i < 4; ++i) {
    convs[i] = Conv2D<Scalar>(Conv2DSpec{in, arch.channels[i], kEncoderKernel, 2, 2});
    in = arch.channels[i];
  }
  fc = Linear<Scalar>(LinearSpec{flat_features(), arch.hidden});
}

std::size_t Trunk::flat_features() const {
  std::size_t extent = kImageSize;
  for (const auto& c : convs) extent = c.spec().output_extent(extent);
  return convs.back().spec().out_channels * extent * extent;
}

FVar Trunk::forward(FTape& tape, const FVar& images) {
  require_images(images, "encoder trunk");
  FVar h = images;
  for (auto& conv : convs) h = relu(conv.forward(tape, h));
  const std::size_t batch = h.shape()[0];
  h = reshape(h, Shape{batch, numel(h.shape()) / batch});
  return fc.forward(tape, h);
}

void Trunk::init(Rng& rng) {
  for (auto& c : convs) c.init(rng);
  fc.init(rng);
}

void Trunk::collect(const std::string& prefix, NamedParams<Scalar>& out) {
  for (std::size_t i = 0; i < convs.size(); ++i) convs[i].collect(prefix + ".conv" + std::to_string(i), out);
  fc.collect(prefix + ".fc", out);
}

std::vector<LayerInfo> Trunk::layers() const {
  std::vector<LayerInfo> out;
  std::size_t extent = kImageSize;
  for (const auto& c : convs) {
    const auto& s = c.spec();
    extent = s.output_extent(extent);
    out.push_back({"conv2d", s.in_channels, s.out_channels, s.kernel_size, s.stride, s.padding, 0,
                   {s.out_channels, extent, extent}});
    out.push_back(act_info("relu", {s.out_channels, extent, extent}));
  }
  out.push_back(act_info("flatten", {flat_features()}));
  out.push_back(linear_info(fc.spec()));
  return out;
}

EncoderStack::EncoderStack(const ArchConfig& arch)
    : trunk(arch),
      label_head(LinearSpec{arch.hidden, 1}),
      latent_head(LinearSpec{arch.hidden, arch.latent}) {}

Encoding EncoderStack::forward(FTape& tape, const FVar& images) {
  Encoding e;
  e.hidden = trunk.forward(tape, images);
  e.label = sigmoid(label_head.forward(tape, e.hidden));
  e.code = latent_head.forward(tape, e.hidden);
  return e;
}

void EncoderStack::init(Rng& rng) {
  trunk.init(rng);
  label_head.init(rng);
  latent_head.init(rng);
}

void EncoderStack::collect(const std::string& prefix, NamedParams<Scalar>& out) {
  trunk.collect(prefix + ".trunk", out);
  label_head.collect(prefix + ".label_head", out);
  latent_head.collect(prefix + ".latent_head", out);
}

std::vector<LayerInfo> EncoderStack::layers() const {
  auto out = trunk.layers();
  out.push_back(linear_info(label_head.spec()));
  out.push_back(act_info("sigmoid", {1}));
  out.push_back(linear_info(latent_head.spec()));
  return out;
}

DecoderStack::DecoderStack(const ArchConfig& arch) : seed_channels_(arch.channels[3]) {
  fc = Linear<Scalar>(LinearSpec{1 + arch.latent, seed_channels_ * kSeedExtent * kSeedExtent});
  const std::array<std::size_t, 5> widths{arch.channels[3], arch.channels[2], arch.channels[1],
                                          arch.channels[0], kImageChannels};
  for (std::size_t i = 0; i < 4; ++i) {
    tconvs[i] = ConvTranspose2D<Scalar>(
        TransposedConv2DSpec{widths[i], widths[i + 1], kDecoderKernel, 2, 1, 1});
  }
}

FVar DecoderStack::forward(FTape& tape, const FVar& label, const FVar& code) {
  if (label.shape().size() != 2 || label.shape()[1] != 1) {
    throw ShapeError("decoder label input must be [B x 1], got " + to_string(label.shape()));
  }
  if (code.shape().size() != 2 || code.shape()[1] + 1 != fc.spec().in_features) {
    throw ShapeError("decoder code input must be [B x " + std::to_string(fc.spec().in_features - 1) +
                     "], got " + to_string(code.shape()));
  }
  const std::size_t batch = label.shape()[0];
  FVar h = relu(fc.forward(tape, concat_columns(label, code)));
  h = reshape(h, Shape{batch, seed_channels_, kSeedExtent, kSeedExtent});
  for (std::size_t i = 0; i < tconvs.size(); ++i) {
    h = tconvs[i].forward(tape, h);
    h = (i + 1 < tconvs.size()) ? relu(h) : sigmoid(h);
  }
  return h;
}

void DecoderStack::init(Rng& rng) {
  fc.init(rng);
  for (auto& t : tconvs) t.init(rng);
}

void DecoderStack::collect(const std::string& prefix, NamedParams<Scalar>& out) {
  fc.collect(prefix + ".fc", out);
  for (std::size_t i = 0; i < tconvs.size(); ++i) tconvs[i].collect(prefix + ".tconv" + std::to_string(i), out);
}

std::vector<LayerInfo> DecoderStack::layers() const {
  std::vector<LayerInfo> out;
  out.push_back(act_info("concat", {fc.spec().in_features}));
  out.push_back(linear_info(fc.spec()));
  out.push_back(act_info("relu", {fc.spec().out_features}));
  out.push_back(act_info("reshape", {seed_channels_, kSeedExtent, kSeedExtent}));
  std::size_t extent = kSeedExtent;
  for (std::size_t i = 0; i < tconvs.size(); ++i) {
    const auto& s = tconvs[i].spec();
    extent = s.output_extent(extent);
    out.push_back({"tconv2d", s.in_channels, s.out_channels, s.kernel_size, s.stride, s.padding,
                   s.output_padding, {s.out_channels, extent, extent}});
    out.push_back(act_info(i + 1 < tconvs.size() ? "relu" : "sigmoid", {s.out_channels, extent, extent}));
  }
  return out;
}

Discriminator::Discriminator(DiscriminatorKind kind, const ArchConfig& arch)
    : hidden(LinearSpec{kind == DiscriminatorKind::latent ? arch.latent : 1, arch.disc_hidden}),
      output(LinearSpec{arch.disc_hidden, 1}),
      kind_(kind) {}

FVar Discriminator::forward(FTape& tape, const FVar& samples) {
  if (samples.shape().size() != 2 || samples.shape()[1] != hidden.spec().in_features) {
    throw ShapeError("discriminator expects [B x " + std::to_string(hidden.spec().in_features) +
                     "], got " + to_string(samples.shape()));
  }
  return sigmoid(output.forward(tape, relu(hidden.forward(tape, samples))));
}

void Discriminator::init(Rng& rng) {
  hidden.init(rng);
  output.init(rng);
}

void Discriminator::collect(const std::string& prefix, NamedParams<Scalar>& out) {
  hidden.collect(prefix + ".hidden", out);
  output.collect(prefix + ".output", out);
}

std::vector<LayerInfo> Discriminator::layers() const {
  return {linear_info(hidden.spec()), act_info("relu", {hidden.spec().out_features}),
          linear_info(output.spec()), act_info("sigmoid", {1})};
}

CnnClassifier::CnnClassifier(const ArchConfig& arch) : trunk(arch), head(LinearSpec{arch.hidden, 1}) {}

FVar CnnClassifier::forward(FTape& tape, const FVar& images) {
  return sigmoid(head.forward(tape, trunk.forward(tape, images)));
}

void CnnClassifier::init(Rng& rng) {
  trunk.init(rng);
  head.init(rng);
}

void CnnClassifier::collect(const std::string& prefix, NamedParams<Scalar>& out) {
  trunk.collect(prefix + ".trunk", out);
  head.collect(prefix + ".head", out);
}

std::vector<LayerInfo> CnnClassifier::layers() const {
  auto out = trunk.layers();
  out.push_back(linear_info(head.spec()));
  out.push_back(act_info("sigmoid", {1}));
  return out;
}

// ---------------------------------------------------------------------------

Model::Model(VariantKind kind, const ArchConfig& arch, double sigma, std::uint64_t seed)
    : kind_(kind), arch_(arch) {
  if (!(sigma >= 0.0)) throw ConfigError("corruption sigma must be non-negative");
  const VariantFlags f = flags_of(kind);
  corruption_ = {f.denoising ? sigma : 0.0, mix_seed(seed, "corruption")};
  Rng rng(mix_seed(seed, "init"));
  if (f.autoencoder) {
    encoder.emplace(arch);
    decoder.emplace(arch);
    latent_disc.emplace(DiscriminatorKind::latent, arch);
    label_disc.emplace(DiscriminatorKind::label, arch);
    encoder->init(rng);
    decoder->init(rng);
    latent_disc->init(rng);
    label_disc->init(rng);
  } else {
    cnn.emplace(arch);
    cnn->init(rng);
  }
}

NamedParams<Scalar> Model::parameters() {
  NamedParams<Scalar> out;
  if (cnn) cnn->collect("cnn", out);
  if (encoder) encoder->collect("encoder", out);
  if (decoder) decoder->collect("decoder", out);
  if (latent_disc) latent_disc->collect("latent_disc", out);
  if (label_disc) label_disc->collect("label_disc", out);
  return out;
}

NamedParams<Scalar> Model::trunk_parameters() {
  NamedParams<Scalar> out;
  if (cnn) cnn->trunk.collect("cnn.trunk", out);
  if (encoder) encoder->trunk.collect("encoder.trunk", out);
  return out;
}

NamedParams<Scalar> Model::label_head_parameters() {
  NamedParams<Scalar> out;
  if (cnn) cnn->head.collect("cnn.head", out);
  if (encoder) encoder->label_head.collect("encoder.label_head", out);
  return out;
}

NamedParams<Scalar> Model::latent_head_parameters() {
  NamedParams<Scalar> out;
  if (encoder) encoder->latent_head.collect("encoder.latent_head", out);
  return out;
}

NamedParams<Scalar> Model::decoder_parameters() {
  NamedParams<Scalar> out;
  if (decoder) decoder->collect("decoder", out);
  return out;
}

NamedParams<Scalar> Model::latent_disc_parameters() {
  NamedParams<Scalar> out;
  if (latent_disc) latent_disc->collect("latent_disc", out);
  return out;
}

NamedParams<Scalar> Model::label_disc_parameters() {
  NamedParams<Scalar> out;
  if (label_disc) label_disc->collect("label_disc", out);
  return out;
}

std::size_t Model::parameter_count() {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.second->numel();
  return n;
}

std::vector<FTensor> Model::snapshot() {
  std::vector<FTensor> out;
  for (const auto& p : parameters()) out.emplace_back(p.second->shape(), p.second->values());
  return out;
}

void Model::restore(const std::vector<FTensor>& values) {
  auto params = parameters();
  if (values.size() != params.size()) throw ContractError("restore: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].shape() != params[i].second->shape()) {
      throw ShapeError("restore: shape mismatch for " + params[i].first);
    }
    params[i].second->values() = values[i].values();
  }
}

// ---------------------------------------------------------------------------

Encoding encode(Model& model, FTape& tape, const FVar& images) {
  if (!model.encoder) throw ProtocolError(std::string(name_of(model.kind())) + " has no encoder");
  return model.encoder->forward(tape, images);
}

FVar decode(Model& model, FTape& tape, const FVar& label, const FVar& code) {
  if (!model.decoder) throw ProtocolError(std::string(name_of(model.kind())) + " has no decoder");
  return model.decoder->forward(tape, label, code);
}

FVar discriminate(Discriminator& d, FTape& tape, const FVar& samples) { return d.forward(tape, samples); }

FVar cnn_forward(Model& model, FTape& tape, const FVar& images) {
  if (!model.cnn) throw ProtocolError(std::string(name_of(model.kind())) + " is not a CNN variant");
  return model.cnn->forward(tape, images);
}

std::vector<Scalar> predict(Model& model, const FTensor& images, std::size_t batch_size) {
  if (images.rank() != 4) throw ShapeError("predict expects an image batch, got " + to_string(images.shape()));
  const std::size_t n = images.dim(0);
  const std::size_t per = numel(images.shape()) / std::max<std::size_t>(n, 1);
  std::vector<Scalar> scores;
  scores.reserve(n);
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t b = std::min(batch_size, n - start);
    FTape tape(false);
    auto first = images.values().begin() + static_cast<std::ptrdiff_t>(start * per);
    FVar x = tape.constant(Shape{b, images.dim(1), images.dim(2), images.dim(3)},
                           std::vector<Scalar>(first, first + static_cast<std::ptrdiff_t>(b * per)));
    FVar y = model.cnn ? cnn_forward(model, tape, x) : encode(model, tape, x).label;
    auto v = y.values();
    scores.insert(scores.end(), v.begin(), v.end());
  }
  return scores;
}

FTensor sample_prior(PriorKind kind, std::size_t batch, Rng& rng, std::size_t latent_dim, double p_one) {
  if (kind == PriorKind::latent) {
    FTensor z(Shape{batch, latent_dim});
    for (Scalar& v : z.values()) v = static_cast<Scalar>(rng.normal());
    return z;
  }
  FTensor y(Shape{batch, 1});
  for (Scalar& v : y.values()) v = rng.bernoulli(p_one) ? Scalar{1} : Scalar{0};
  return y;
}

FTensor generate(Model& model, std::size_t n, GenerateLabel label, std::uint64_t seed) {
  if (n == 0) throw ConfigError("generate: n must be positive");
  if (!model.decoder) throw ProtocolError(std::string(name_of(model.kind())) + " cannot generate images");
  Rng rng(seed);
  FTensor z = sample_prior(PriorKind::latent, n, rng, model.arch().latent);
  FTensor y(Shape{n, 1});
  if (label == GenerateLabel::random) {
    y = sample_prior(PriorKind::label, n, rng);
  } else {
    std::fill(y.values().begin(), y.values().end(), label == GenerateLabel::one ? Scalar{1} : Scalar{0});
  }
  FTape tape(false);
  return decode(model, tape, tape.constant(std::move(y)), tape.constant(std::move(z))).to_tensor();
}

FreezeGuard::FreezeGuard(NamedParams<Scalar> params) : params_(std::move(params)) {
  for (auto& p : params_) {
    previous_.push_back(p.second->requires_grad());
    p.second->set_requires_grad(false);
  }
}

FreezeGuard::~FreezeGuard() {
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i].second->set_requires_grad(previous_[i]);
}

}  // namespace ssdaae
