#include "ssdaae/optim.hpp"

#include <cmath>

#include "ssdaae/errors.hpp"

namespace ssdaae {

template <typename T>
RMSProp<T>::RMSProp(NamedParams<T> params, RMSPropOptions options)
    : params_(std::move(params)), options_(options) {
  if (!(options_.learning_rate >= 0.0) || !(options_.momentum >= 0.0 && options_.momentum < 1.0) ||
      !(options_.decay > 0.0 && options_.decay < 1.0) || !(options_.epsilon > 0.0)) {
    throw ConfigError("RMSProp: invalid hyperparameters");
  }
}

template <typename T>
void RMSProp<T>::step() {
  for (const auto& [name, p] : params_) {
    if (!p->has_grad() || p->grad().size() != p->numel()) {
      throw ContractError("RMSProp: parameter '" + name + "' has no gradient");
    }
  }
  if (square_avg_.empty()) {
    for (const auto& entry : params_) {
      square_avg_.emplace_back(entry.second->numel(), T{0});
      momentum_.emplace_back(entry.second->numel(), T{0});
    }
  }
  const T lr = static_cast<T>(options_.learning_rate);
  const T mu = static_cast<T>(options_.momentum);
  const T decay = static_cast<T>(options_.decay);
  const T eps = static_cast<T>(options_.epsilon);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor<T>& p = *params_[i].second;
    auto g = p.grad();
    auto& v = square_avg_[i];
    auto& m = momentum_[i];
    auto w = p.values().data();
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = decay * v[j] + (T{1} - decay) * g[j] * g[j];
      m[j] = mu * m[j] + g[j] / std::sqrt(v[j] + eps);
      w[j] -= lr * m[j];
    }
  }
}

template <typename T>
void RMSProp<T>::zero_grad() {
  for (const auto& entry : params_) entry.second->zero_grad();
}

template class RMSProp<float>;
template class RMSProp<double>;

}  // namespace ssdaae
