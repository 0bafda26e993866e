#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sslse/autodiff/tensor.hpp"

namespace sslse::model {

/// Insertion-ordered collection of named parameter tensors. Order is stable
/// and is the order used for optimizer state and checkpoints.
template <typename T>
class ParamSet {
 public:
  ad::Tensor<T>& add(std::string name, ad::Tensor<T> tensor);

  bool contains(std::string_view name) const noexcept;
  ad::Tensor<T>& at(std::string_view name);
  const ad::Tensor<T>& at(std::string_view name) const;

  std::size_t size() const noexcept { return tensors_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::vector<ad::Tensor<T>>& tensors() noexcept { return tensors_; }
  const std::vector<ad::Tensor<T>>& tensors() const noexcept { return tensors_; }

  /// Handles (aliasing, not copies) of every tensor whose name starts with prefix.
  std::vector<ad::Tensor<T>> with_prefix(std::string_view prefix) const;

  /// Deep copy.
  ParamSet clone() const;

  void set_requires_grad(bool flag);
  void zero_grad();

  std::size_t element_count() const noexcept;

 private:
  std::vector<std::string> names_;
  std::vector<ad::Tensor<T>> tensors_;
};

extern template class ParamSet<float>;
extern template class ParamSet<double>;

}  // namespace sslse::model
