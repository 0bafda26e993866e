#include "sslse/autodiff/tape.hpp"

#include <algorithm>

#include "sslse/error.hpp"

namespace sslse::ad {

template <typename T>
bool Tape<T>::wants(std::initializer_list<const Tensor<T>*> inputs) const noexcept {
  if (!enabled_) return false;
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor<T>* t) { return t && t->defined() && t->requires_grad(); });
}

template <typename T>
void Tape<T>::record(const Tensor<T>& output, std::function<void()> backward_rule) {
  entries_.push_back(Entry{output.node(), std::move(backward_rule)});
}

template <typename T>
bool Tape<T>::contains(const Tensor<T>& t) const noexcept {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.output == t.node(); });
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (consumed_) throw Error(Errc::DoubleBackward, "tape already ran backward; reset() before reuse");
  if (!loss.defined() || loss.size() != 1) {
    throw Error(Errc::NonScalarLoss,
                "loss must have exactly one element, got shape " + (loss.defined() ? shape_string(loss.shape()) : "()"));
  }
  if (!contains(loss)) throw Error(Errc::NotOnTape, "loss was not produced by an op on this tape");
  consumed_ = true;

  Tensor<T> seed = loss;
  seed.grad()[0] += T{1};
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->output->grad.empty()) continue;  // no gradient flows through this op
    it->backward_rule();
  }
}

template <typename T>
void Tape<T>::reset() noexcept {
  entries_.clear();
  consumed_ = false;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace sslse::ad
