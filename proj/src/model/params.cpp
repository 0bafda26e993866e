#include "sslse/model/params.hpp"

#include <algorithm>

#include "sslse/error.hpp"

namespace sslse::model {

template <typename T>
ad::Tensor<T>& ParamSet<T>::add(std::string name, ad::Tensor<T> tensor) {
  if (contains(name)) throw Error(Errc::InvalidSpec, "duplicate parameter name " + name);
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(tensor));
  return tensors_.back();
}

template <typename T>
bool ParamSet<T>::contains(std::string_view name) const noexcept {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

template <typename T>
ad::Tensor<T>& ParamSet<T>::at(std::string_view name) {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(Errc::MissingInput, "no parameter named " + std::string(name));
  return tensors_[static_cast<std::size_t>(it - names_.begin())];
}

template <typename T>
const ad::Tensor<T>& ParamSet<T>::at(std::string_view name) const {
  return const_cast<ParamSet*>(this)->at(name);
}

template <typename T>
std::vector<ad::Tensor<T>> ParamSet<T>::with_prefix(std::string_view prefix) const {
  std::vector<ad::Tensor<T>> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (std::string_view(names_[i]).starts_with(prefix)) out.push_back(tensors_[i]);
  }
  return out;
}

template <typename T>
ParamSet<T> ParamSet<T>::clone() const {
  ParamSet out;
  for (std::size_t i = 0; i < names_.size(); ++i) out.add(names_[i], tensors_[i].clone());
  return out;
}

template <typename T>
void ParamSet<T>::set_requires_grad(bool flag) {
  for (auto& t : tensors_) t.set_requires_grad(flag);
}

template <typename T>
void ParamSet<T>::zero_grad() {
  for (auto& t : tensors_) t.zero_grad();
}

template <typename T>
std::size_t ParamSet<T>::element_count() const noexcept {
  std::size_t total = 0;
  for (const auto& t : tensors_) total += t.size();
  return total;
}

template class ParamSet<float>;
template class ParamSet<double>;

}  // namespace sslse::model
