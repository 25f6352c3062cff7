#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssdaae/layers.hpp"

namespace ssdaae {

using Scalar = float;
using FTensor = Tensor<Scalar>;
using FVar = Var<Scalar>;
using FTape = Tape<Scalar>;

inline constexpr std::size_t kImageChannels = 3;
inline constexpr std::size_t kImageSize = 64;

// Widths of the networks. The default is the published architecture; desk()
// keeps every layer, kernel, stride and the 200-d code but narrows the channel
// and hidden widths so CPU-only runs finish in minutes.
struct ArchConfig {
  std::array<std::size_t, 4> channels{64, 128, 256, 512};
  std::size_t hidden = 1000;
  std::size_t latent = 200;
  std::size_t disc_hidden = 1000;

  static ArchConfig paper() { return {}; }
  static ArchConfig desk() { return {{8, 16, 32, 64}, 128, 200, 256}; }
  bool operator==(const ArchConfig&) const = default;
};

enum class VariantKind { cnn, cnn_noise, saae, sdaae, ssaae, ssdaae };

struct VariantFlags {
  bool denoising = false;
  bool autoencoder = false;
  bool unlabelled = false;
  bool operator==(const VariantFlags&) const = default;
};

VariantFlags flags_of(VariantKind kind);
std::string_view name_of(VariantKind kind);
// Accepts the names printed by name_of ("cnn", "cnn+noise", "saae", ...); also "cnn_noise".
VariantKind parse_variant(std::string_view name);
inline constexpr std::array<VariantKind, 6> kAllVariants{VariantKind::cnn,  VariantKind::cnn_noise,
                                                         VariantKind::saae, VariantKind::sdaae,
                                                         VariantKind::ssaae, VariantKind::ssdaae};

struct CorruptionSpec {
  double sigma = 0.0;  // standard deviation of the additive noise
  std::uint64_t seed = 0;
};

// x + n with n ~ N(0, sigma^2) per element. Not re-clipped to [0, 1].
FTensor corrupt(const FTensor& x, double sigma, Rng& rng);
FTensor corrupt(const FTensor& x, const CorruptionSpec& spec);

// One row of a model's layer listing, for architecture inspection.
struct LayerInfo {
  std::string kind;  // conv2d, tconv2d, linear, relu, sigmoid, flatten, reshape
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t kernel = 0;
  std::size_t stride = 0;
  std::size_t padding = 0;
  std::size_t output_padding = 0;
  Shape output;  // per-sample output shape
  bool operator==(const LayerInfo&) const = default;
};

// Four stride-2 5x5 convolutions with relu, flattened channel-major, then a linear layer.
class Trunk {
 public:
  Trunk() = default;
  explicit Trunk(const ArchConfig& arch);

  FVar forward(FTape& tape, const FVar& images);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<Scalar>& out);
  std::vector<LayerInfo> layers() const;
  std::size_t flat_features() const;

  std::array<Conv2D<Scalar>, 4> convs;
  Linear<Scalar> fc;
};

struct Encoding {
  FVar hidden;  // trunk output
  FVar label;   // [B x 1] in (0,1)
  FVar code;    // [B x latent]
};

class EncoderStack {
 public:
  EncoderStack() = default;
  explicit EncoderStack(const ArchConfig& arch);

  Encoding forward(FTape& tape, const FVar& images);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<Scalar>& out);
  std::vector<LayerInfo> layers() const;

  Trunk trunk;
  Linear<Scalar> label_head;
  Linear<Scalar> latent_head;
};

class DecoderStack {
 public:
  DecoderStack() = default;
  explicit DecoderStack(const ArchConfig& arch);

  // Reconstructs images from [label, code].
  FVar forward(FTape& tape, const FVar& label, const FVar& code);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<Scalar>& out);
  std::vector<LayerInfo> layers() const;

  Linear<Scalar> fc;
  std::array<ConvTranspose2D<Scalar>, 4> tconvs;

 private:
  std::size_t seed_channels_ = 0;
};

enum class DiscriminatorKind { latent, label };

class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(DiscriminatorKind kind, const ArchConfig& arch);

  // Probability that each row was drawn from the prior.
  FVar forward(FTape& tape, const FVar& samples);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<Scalar>& out);
  std::vector<LayerInfo> layers() const;
  DiscriminatorKind kind() const { return kind_; }

  Linear<Scalar> hidden;
  Linear<Scalar> output;

 private:
  DiscriminatorKind kind_ = DiscriminatorKind::latent;
};

class CnnClassifier {
 public:
  CnnClassifier() = default;
  explicit CnnClassifier(const ArchConfig& arch);

  FVar forward(FTape& tape, const FVar& images);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<Scalar>& out);
  std::vector<LayerInfo> layers() const;

  Trunk trunk;
  Linear<Scalar> head;
};

// One of the six ablation models. Parameter tensors are owned here; optimizers
// hold pointers into them, so a Model must stay put once optimizers exist.
class Model {
 public:
  Model(VariantKind kind, const ArchConfig& arch, double sigma, std::uint64_t seed);

  VariantKind kind() const { return kind_; }
  VariantFlags flags() const { return flags_of(kind_); }
  const ArchConfig& arch() const { return arch_; }
  // Corruption applied at training time; sigma is forced to 0 for non-denoising variants.
  const CorruptionSpec& corruption() const { return corruption_; }

  std::optional<CnnClassifier> cnn;
  std::optional<EncoderStack> encoder;
  std::optional<DecoderStack> decoder;
  std::optional<Discriminator> latent_disc;
  std::optional<Discriminator> label_disc;

  NamedParams<Scalar> parameters();
  NamedParams<Scalar> trunk_parameters();
  NamedParams<Scalar> label_head_parameters();
  NamedParams<Scalar> latent_head_parameters();
  NamedParams<Scalar> decoder_parameters();
  NamedParams<Scalar> latent_disc_parameters();
  NamedParams<Scalar> label_disc_parameters();
  std::size_t parameter_count();

  // Copies of all parameter values, in parameters() order.
  std::vector<FTensor> snapshot();
  void restore(const std::vector<FTensor>& values);

 private:
  VariantKind kind_;
  ArchConfig arch_;
  CorruptionSpec corruption_;
};

Encoding encode(Model& model, FTape& tape, const FVar& images);
FVar decode(Model& model, FTape& tape, const FVar& label, const FVar& code);
FVar discriminate(Discriminator& d, FTape& tape, const FVar& samples);
// Classifier probability for CNN variants (no corruption applied here).
FVar cnn_forward(Model& model, FTape& tape, const FVar& images);
// P(label = 1) on clean inputs for any variant.
std::vector<Scalar> predict(Model& model, const FTensor& images, std::size_t batch_size = 128);

enum class PriorKind { latent, label };
// latent: [B x dim] standard normal; label: [B x 1] Bernoulli(p_one) over {0, 1}.
FTensor sample_prior(PriorKind kind, std::size_t batch, Rng& rng, std::size_t latent_dim = 200,
                     double p_one = 0.5);

enum class GenerateLabel { zero, one, random };
// Decodes prior samples. The latent draws come first from the seeded stream, so
// calls differing only in `label` share the same codes.
FTensor generate(Model& model, std::size_t n, GenerateLabel label, std::uint64_t seed);

// Excludes `params` from gradient recording for its lifetime.
class FreezeGuard {
 public:
  explicit FreezeGuard(NamedParams<Scalar> params);
  ~FreezeGuard();
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  NamedParams<Scalar> params_;
  std::vector<bool> previous_;
};

}  // namespace ssdaae
