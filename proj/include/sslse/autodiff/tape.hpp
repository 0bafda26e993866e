#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sslse/autodiff/tensor.hpp"

namespace sslse::ad {

/// Records differentiable operations in execution order and replays their
/// backward rules in reverse. A disabled tape records nothing, which is how
/// inference-only forward passes run.
template <typename T>
class Tape {
 public:
  explicit Tape(bool enabled = true) : enabled_(enabled) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool enabled() const noexcept { return enabled_; }

  /// True when an op over `inputs` needs recording.
  bool wants(std::initializer_list<const Tensor<T>*> inputs) const noexcept;

  void record(const Tensor<T>& output, std::function<void()> backward_rule);

  /// Seeds d(loss)/d(loss) = 1 and runs every recorded rule once, newest first.
  void backward(const Tensor<T>& loss);

  bool contains(const Tensor<T>& t) const noexcept;
  std::size_t size() const noexcept { return entries_.size(); }

  /// Drops all recorded ops so the tape can be reused.
  void reset() noexcept;

 private:
  struct Entry {
    std::shared_ptr<Node<T>> output;
    std::function<void()> backward_rule;
  };
  std::vector<Entry> entries_;
  bool enabled_;
  bool consumed_ = false;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace sslse::ad
