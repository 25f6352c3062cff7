#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ssdaae/tensor.hpp"

namespace ssdaae {

template <typename T>
class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives
// and has not been cleared.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<T>& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Shape& shape() const;
  std::size_t numel() const;
  std::span<const T> values() const;
  T item() const;
  bool needs_grad() const;
  // Gradient of the last backward pass with respect to this value (empty if none reached it).
  std::span<const T> grad() const;

  // Copies the value out into a standalone tensor.
  Tensor<T> to_tensor() const;

 private:
  Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Linear record of a forward computation. Nodes are appended in evaluation
// order, so reverse index order is a valid topological order for backward.
template <typename T>
class Tape {
 public:
  // Receives the tape and the id of the node whose output gradient is ready.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // References `tensor` without copying. When the tensor requires grad (and the
  // tape records gradients) backward accumulates into tensor.grad(). The tensor
  // must outlive the tape and must not be modified while the tape is in use.
  Var<T> leaf(Tensor<T>& tensor);
  // Owned value that never receives gradients.
  Var<T> constant(Tensor<T> tensor);
  Var<T> constant(Shape shape, std::vector<T> values);
  Var<T> scalar(T value) { return constant(Shape{}, {value}); }
  // Copy of `v` cut from the graph.
  Var<T> detach(const Var<T>& v);

  // Appends an operation output. `backward` is kept only if some input needs grad.
  Var<T> record(Shape shape, std::vector<T> value, std::vector<std::size_t> inputs,
                BackwardFn backward);

  // Reverse sweep from a single-element loss. Each node is visited at most once.
  void backward(const Var<T>& loss);

  bool grad_enabled() const { return grad_enabled_; }
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  const Shape& shape(std::size_t id) const { return nodes_.at(id).shape; }
  std::span<const T> value(std::size_t id) const;
  bool needs_grad(std::size_t id) const { return nodes_.at(id).needs_grad; }
  // Gradient buffer of a node, allocated (zero) on first access.
  std::span<T> grad(std::size_t id);
  std::span<const T> grad_if_present(std::size_t id) const { return nodes_.at(id).grad; }

 private:
  struct Node {
    Shape shape;
    std::vector<T> value;
    Tensor<T>* external = nullptr;
    std::vector<T> grad;
    bool needs_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };

  bool grad_enabled_;
  std::vector<Node> nodes_;
};

extern template class Var<float>;
extern template class Var<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace ssdaae
