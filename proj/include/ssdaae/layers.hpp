#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ssdaae/ops.hpp"
#include "ssdaae/rng.hpp"
#include "ssdaae/tensor.hpp"

namespace ssdaae {

struct Conv2DSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_size = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  // floor((n + 2p - k) / s) + 1
  std::size_t output_extent(std::size_t n) const;
  bool operator==(const Conv2DSpec&) const = default;
};

struct TransposedConv2DSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_size = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t output_padding = 0;

  // (n - 1) s - 2p + k + output_padding
  std::size_t output_extent(std::size_t n) const;
  bool operator==(const TransposedConv2DSpec&) const = default;
};

struct LinearSpec {
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  bool operator==(const LinearSpec&) const = default;
};

template <typename T>
using NamedParams = std::vector<std::pair<std::string, Tensor<T>*>>;

// Weights are drawn uniformly from +-1/sqrt(fan_in); biases start at zero.
template <typename T>
class Conv2D {
 public:
  Conv2D() = default;
  explicit Conv2D(Conv2DSpec spec);

  const Conv2DSpec& spec() const { return spec_; }
  Var<T> forward(Tape<T>& tape, const Var<T>& input);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<T>& out);

  Tensor<T> weight;  // [out x in x k x k]
  Tensor<T> bias;    // [out]

 private:
  Conv2DSpec spec_;
};

template <typename T>
class ConvTranspose2D {
 public:
  ConvTranspose2D() = default;
  explicit ConvTranspose2D(TransposedConv2DSpec spec);

  const TransposedConv2DSpec& spec() const { return spec_; }
  Var<T> forward(Tape<T>& tape, const Var<T>& input);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<T>& out);

  Tensor<T> weight;  // [in x out x k x k]
  Tensor<T> bias;    // [out]

 private:
  TransposedConv2DSpec spec_;
};

template <typename T>
class Linear {
 public:
  Linear() = default;
  explicit Linear(LinearSpec spec);

  const LinearSpec& spec() const { return spec_; }
  Var<T> forward(Tape<T>& tape, const Var<T>& input);
  void init(Rng& rng);
  void collect(const std::string& prefix, NamedParams<T>& out);

  Tensor<T> weight;  // [out x in]
  Tensor<T> bias;    // [out]

 private:
  LinearSpec spec_;
};

enum class Activation { relu, sigmoid };

template <typename T>
Var<T> activation(Activation kind, const Var<T>& input);

// Mean binary cross-entropy with clamped logs. Throws DomainError if a
// prediction lies outside [0, 1].
template <typename T>
Var<T> bce(const Var<T>& prediction, const Var<T>& target);

// Mean squared difference.
template <typename T>
Var<T> mse(const Var<T>& a, const Var<T>& b);

extern template class Conv2D<float>;
extern template class Conv2D<double>;
extern template class ConvTranspose2D<float>;
extern template class ConvTranspose2D<double>;
extern template class Linear<float>;
extern template class Linear<double>;

}  // namespace ssdaae
