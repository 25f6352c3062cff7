#include "ssdaae/tape.hpp"

#include <algorithm>

#include "ssdaae/errors.hpp"

namespace ssdaae {

template <typename T>
const Shape& Var<T>::shape() const {
  return tape_->shape(id_);
}

template <typename T>
std::size_t Var<T>::numel() const {
  return tape_->value(id_).size();
}

template <typename T>
std::span<const T> Var<T>::values() const {
  return tape_->value(id_);
}

template <typename T>
T Var<T>::item() const {
  auto v = values();
  if (v.size() != 1) throw ContractError("item() on value of shape " + to_string(shape()));
  return v[0];
}

template <typename T>
bool Var<T>::needs_grad() const {
  return tape_->needs_grad(id_);
}

template <typename T>
std::span<const T> Var<T>::grad() const {
  return tape_->grad_if_present(id_);
}

template <typename T>
Tensor<T> Var<T>::to_tensor() const {
  auto v = values();
  return Tensor<T>(shape(), std::vector<T>(v.begin(), v.end()));
}

template <typename T>
Var<T> Tape<T>::leaf(Tensor<T>& tensor) {
  Node node;
  node.shape = tensor.shape();
  node.external = &tensor;
  node.needs_grad = grad_enabled_ && tensor.requires_grad();
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::constant(Tensor<T> tensor) {
  Node node;
  node.shape = tensor.shape();
  node.value = std::move(tensor.values());
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::constant(Shape shape, std::vector<T> values) {
  return constant(Tensor<T>(std::move(shape), std::move(values)));
}

template <typename T>
Var<T> Tape<T>::detach(const Var<T>& v) {
  return constant(v.to_tensor());
}

template <typename T>
Var<T> Tape<T>::record(Shape shape, std::vector<T> value, std::vector<std::size_t> inputs,
                       BackwardFn backward) {
  Node node;
  node.shape = std::move(shape);
  node.value = std::move(value);
  if (grad_enabled_) {
    node.needs_grad = std::any_of(inputs.begin(), inputs.end(),
                                  [this](std::size_t i) { return nodes_.at(i).needs_grad; });
  }
  if (node.needs_grad) {
    node.inputs = std::move(inputs);
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
std::span<const T> Tape<T>::value(std::size_t id) const {
  const Node& node = nodes_.at(id);
  if (node.external) return node.external->data();
  return node.value;
}

template <typename T>
std::span<T> Tape<T>::grad(std::size_t id) {
  Node& node = nodes_.at(id);
  const std::size_t n = node.external ? node.external->numel() : node.value.size();
  if (node.grad.size() != n) node.grad.assign(n, T{0});
  return node.grad;
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss) {
  if (&loss.tape() != this) throw ContractError("backward: loss was recorded on a different tape");
  if (loss.numel() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " + to_string(loss.shape()));
  }
  for (auto& node : nodes_) node.grad.clear();
  if (!nodes_[loss.id()].needs_grad) return;
  grad(loss.id())[0] = T{1};

  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.needs_grad || node.grad.empty()) continue;
    if (node.external) {
      auto dst = node.external->mutable_grad();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += node.grad[i];
    } else if (node.backward) {
      node.backward(*this, id);
    }
  }
}

template class Var<float>;
template class Var<double>;
template class Tape<float>;
template class Tape<double>;

}  // namespace ssdaae
