#include "sslse/autodiff/tensor.hpp"

#include <functional>
#include <numeric>

#include "sslse/error.hpp"

namespace sslse::ad {

std::size_t numel(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

template <typename T>
Tensor<T>::Tensor(Shape shape, bool requires_grad) : node_(std::make_shared<Node<T>>()) {
  node_->value.assign(numel(shape), T{0});
  node_->shape = std::move(shape);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values, bool requires_grad)
    : node_(std::make_shared<Node<T>>()) {
  if (values.size() != numel(shape)) {
    throw Error(Errc::ShapeMismatch, "tensor data length " + std::to_string(values.size()) +
                                         " does not match shape " + shape_string(shape));
  }
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return Tensor(Shape{1}, std::vector<T>{value}, requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw Error(Errc::ShapeMismatch, "item() on tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

template <typename T>
std::span<T> Tensor<T>::grad() {
  if (node_->grad.empty()) node_->grad.assign(node_->value.size(), T{0});
  return node_->grad;
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  Tensor out(node_->shape, node_->value, node_->requires_grad);
  out.node_->grad = node_->grad;
  return out;
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace sslse::ad
