#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sslse/autodiff/tensor.hpp"

namespace sslse::ad {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment buffers, one per parameter in the order passed to
/// adam_step. Empty until the first step.
template <typename T>
struct AdamState {
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;
  std::uint64_t step = 0;
};

/// Bias-corrected Adam update using each parameter's accumulated grad.
/// Parameters without a grad are treated as having a zero gradient.
template <typename T>
void adam_step(std::span<Tensor<T>> params, AdamState<T>& state, const AdamOptions& options);

template <typename T>
void sgd_step(std::span<Tensor<T>> params, double learning_rate);

}  // namespace sslse::ad
