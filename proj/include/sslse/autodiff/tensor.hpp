#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sslse::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string shape_string(const Shape& shape);

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until something accumulates into it
  bool requires_grad = false;
};

/// Shared handle to an n-dimensional array that may take part in a Tape.
/// Copies alias the same storage; use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);

  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const noexcept { return node_->shape; }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t rank() const noexcept { return node_->shape.size(); }
  std::size_t size() const noexcept { return node_->value.size(); }

  std::span<T> data() noexcept { return node_->value; }
  std::span<const T> data() const noexcept { return node_->value; }
  T& operator[](std::size_t i) { return node_->value[i]; }
  const T& operator[](std::size_t i) const { return node_->value[i]; }
  T item() const;

  bool requires_grad() const noexcept { return node_->requires_grad; }
  void set_requires_grad(bool flag) noexcept { node_->requires_grad = flag; }

  bool has_grad() const noexcept { return !node_->grad.empty(); }
  /// Gradient storage, allocated as zeros on first access.
  std::span<T> grad();
  std::span<const T> grad() const noexcept { return node_->grad; }
  void zero_grad() noexcept { node_->grad.clear(); }

  Tensor clone() const;

  const std::shared_ptr<Node<T>>& node() const noexcept { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace sslse::ad
