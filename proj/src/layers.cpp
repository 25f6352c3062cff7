#include "ssdaae/layers.hpp"

#include <cmath>

#include "ssdaae/errors.hpp"

namespace ssdaae {
namespace {

template <typename T>
void fill_uniform(Tensor<T>& t, Rng& rng, double fan_in) {
  const double bound = 1.0 / std::sqrt(fan_in);
  for (T& v : t.values()) v = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
Tensor<T> parameter(Shape shape) {
  Tensor<T> t(std::move(shape));
  t.set_requires_grad(true);
  return t;
}

}  // namespace

std::size_t Conv2DSpec::output_extent(std::size_t n) const {
  if (n + 2 * padding < kernel_size) throw ShapeError("conv2d: kernel larger than padded input");
  return (n + 2 * padding - kernel_size) / stride + 1;
}

std::size_t TransposedConv2DSpec::output_extent(std::size_t n) const {
  return (n - 1) * stride + kernel_size + output_padding - 2 * padding;
}

template <typename T>
Conv2D<T>::Conv2D(Conv2DSpec spec)
    : weight(parameter<T>({spec.out_channels, spec.in_channels, spec.kernel_size, spec.kernel_size})),
      bias(parameter<T>({spec.out_channels})),
      spec_(spec) {}

template <typename T>
Var<T> Conv2D<T>::forward(Tape<T>& tape, const Var<T>& input) {
  if (input.shape().size() != 4 || input.shape()[1] != spec_.in_channels) {
    throw ShapeError("Conv2D expects " + std::to_string(spec_.in_channels) + " input channels, got " +
                     to_string(input.shape()));
  }
  return conv2d(input, tape.leaf(weight), tape.leaf(bias), spec_.stride, spec_.padding);
}

template <typename T>
void Conv2D<T>::init(Rng& rng) {
  fill_uniform(weight, rng, double(spec_.in_channels * spec_.kernel_size * spec_.kernel_size));
  std::fill(bias.values().begin(), bias.values().end(), T{0});
}

template <typename T>
void Conv2D<T>::collect(const std::string& prefix, NamedParams<T>& out) {
  out.emplace_back(prefix + ".weight", &weight);
  out.emplace_back(prefix + ".bias", &bias);
}

template <typename T>
ConvTranspose2D<T>::ConvTranspose2D(TransposedConv2DSpec spec)
    : weight(parameter<T>({spec.in_channels, spec.out_channels, spec.kernel_size, spec.kernel_size})),
      bias(parameter<T>({spec.out_channels})),
      spec_(spec) {}

template <typename T>
Var<T> ConvTranspose2D<T>::forward(Tape<T>& tape, const Var<T>& input) {
  if (input.shape().size() != 4 || input.shape()[1] != spec_.in_channels) {
    throw ShapeError("ConvTranspose2D expects " + std::to_string(spec_.in_channels) +
                     " input channels, got " + to_string(input.shape()));
  }
  return conv_transpose2d(input, tape.leaf(weight), tape.leaf(bias), spec_.stride, spec_.padding,
                          spec_.output_padding);
}

template <typename T>
void ConvTranspose2D<T>::init(Rng& rng) {
  fill_uniform(weight, rng, double(spec_.in_channels * spec_.kernel_size * spec_.kernel_size));
  std::fill(bias.values().begin(), bias.values().end(), T{0});
}

template <typename T>
void ConvTranspose2D<T>::collect(const std::string& prefix, NamedParams<T>& out) {
  out.emplace_back(prefix + ".weight", &weight);
  out.emplace_back(prefix + ".bias", &bias);
}

template <typename T>
Linear<T>::Linear(LinearSpec spec)
    : weight(parameter<T>({spec.out_features, spec.in_features})),
      bias(parameter<T>({spec.out_features})),
      spec_(spec) {}

template <typename T>
Var<T> Linear<T>::forward(Tape<T>& tape, const Var<T>& input) {
  return linear(input, tape.leaf(weight), tape.leaf(bias));
}

template <typename T>
void Linear<T>::init(Rng& rng) {
  fill_uniform(weight, rng, double(spec_.in_features));
  std::fill(bias.values().begin(), bias.values().end(), T{0});
}

template <typename T>
void Linear<T>::collect(const std::string& prefix, NamedParams<T>& out) {
  out.emplace_back(prefix + ".weight", &weight);
  out.emplace_back(prefix + ".bias", &bias);
}

template <typename T>
Var<T> activation(Activation kind, const Var<T>& input) {
  switch (kind) {
    case Activation::relu:
      return relu(input);
    case Activation::sigmoid:
      return sigmoid(input);
  }
  throw ContractError("unknown activation");
}

template <typename T>
Var<T> bce(const Var<T>& prediction, const Var<T>& target) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError("bce: prediction " + to_string(prediction.shape()) + " vs target " +
                     to_string(target.shape()));
  }
  for (T p : prediction.values()) {
    if (!(p >= T{0} && p <= T{1})) throw DomainError("bce: prediction outside [0,1]: " + std::to_string(p));
  }
  auto pos = mul(target, clamped_log(prediction));
  auto neg = mul(add_scalar(negate(target), T{1}), clamped_log(add_scalar(negate(prediction), T{1})));
  return negate(mean(add(pos, neg)));
}

template <typename T>
Var<T> mse(const Var<T>& a, const Var<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("mse: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  auto d = sub(a, b);
  return mean(mul(d, d));
}

template class Conv2D<float>;
template class Conv2D<double>;
template class ConvTranspose2D<float>;
template class ConvTranspose2D<double>;
template class Linear<float>;
template class Linear<double>;

template Var<float> activation(Activation, const Var<float>&);
template Var<double> activation(Activation, const Var<double>&);
template Var<float> bce(const Var<float>&, const Var<float>&);
template Var<double> bce(const Var<double>&, const Var<double>&);
template Var<float> mse(const Var<float>&, const Var<float>&);
template Var<double> mse(const Var<double>&, const Var<double>&);

}  // namespace ssdaae
