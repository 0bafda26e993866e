#pragma once

#include <functional>
#include <span>

#include "sslse/autodiff/tape.hpp"
#include "sslse/autodiff/tensor.hpp"

namespace sslse::ad {

/// Builds a scalar loss on the given tape from tensors it closes over.
template <typename T>
using LossFn = std::function<Tensor<T>(Tape<T>&)>;

/// Compares tape gradients of `loss` w.r.t. every element of `inputs` against
/// central differences (f(x + eps) - f(x - eps)) / 2eps. Returns the maximum
/// relative error |a - n| / max(|a|, |n|, 1e-12). Inputs are marked
/// requires_grad and restored to their original values afterwards.
template <typename T>
double max_grad_error(const LossFn<T>& loss, std::span<Tensor<T>> inputs, double eps = 1e-5);

/// Single-input convenience form of max_grad_error.
template <typename T>
double grad_check(const std::function<Tensor<T>(Tape<T>&, const Tensor<T>&)>& f, Tensor<T> x,
                  double eps = 1e-5);

}  // namespace sslse::ad
