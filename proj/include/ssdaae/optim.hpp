#pragma once

#include <string>
#include <vector>

#include "ssdaae/layers.hpp"

namespace ssdaae {

struct RMSPropOptions {
  double learning_rate = 1e-4;
  double momentum = 0.0;
  double decay = 0.99;
  double epsilon = 1e-8;
};

// RMSProp with momentum applied to the normalised gradient:
//   v <- decay v + (1 - decay) g^2
//   m <- momentum m + g / sqrt(v + epsilon)
//   p <- p - lr m
// Buffers are allocated on the first step and persist afterwards.
template <typename T>
class RMSProp {
 public:
  RMSProp() = default;
  RMSProp(NamedParams<T> params, RMSPropOptions options);

  const RMSPropOptions& options() const { return options_; }
  const NamedParams<T>& params() const { return params_; }

  // Throws ContractError if a parameter has no gradient.
  void step();
  void zero_grad();

  bool initialised() const { return !square_avg_.empty(); }
  std::vector<std::vector<T>>& square_avg() { return square_avg_; }
  std::vector<std::vector<T>>& momentum_buffer() { return momentum_; }
  const std::vector<std::vector<T>>& square_avg() const { return square_avg_; }
  const std::vector<std::vector<T>>& momentum_buffer() const { return momentum_; }

 private:
  NamedParams<T> params_;
  RMSPropOptions options_;
  std::vector<std::vector<T>> square_avg_;
  std::vector<std::vector<T>> momentum_;
};

extern template class RMSProp<float>;
extern template class RMSProp<double>;

}  // namespace ssdaae
