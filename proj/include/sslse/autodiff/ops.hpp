#pragma once

#include <cstddef>
#include <span>

#include "sslse/autodiff/tape.hpp"
#include "sslse/autodiff/tensor.hpp"

// Differentiable tensor ops. Every op computes its forward value eagerly and,
// when the tape is enabled and an input requires grad, records its backward
// rule. Shapes use NCHW for images and N x D for row batches.
namespace sslse::ad {

struct Conv2dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
};

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> mul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

/// Sum of all elements, shape {1}.
template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& x);

/// Concatenation along axis 0.
template <typename T>
Tensor<T> concat(Tape<T>& tape, std::span<const Tensor<T>> parts);

template <typename T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid(Tape<T>& tape, const Tensor<T>& x);

/// x: N x D, w: D x K, b: K  ->  N x K
template <typename T>
Tensor<T> dense(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

/// Cross-correlation plus bias. x: N x C x H x W, w: F x C x kH x kW, b: F.
/// Output spatial size must be integral: (H + 2p - kH) divisible by stride.
template <typename T>
Tensor<T> conv2d(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 Conv2dOptions options = {});

/// N x C x H x W  ->  N x C (spatial mean).
template <typename T>
Tensor<T> global_avg_pool(Tape<T>& tape, const Tensor<T>& x);

/// Row-wise x / ||x||. Rows with norm <= 1e-12 raise DegenerateNorm.
template <typename T>
Tensor<T> l2_normalize(Tape<T>& tape, const Tensor<T>& x);

/// Mean over rows of -log softmax(logits)[label], log-sum-exp stabilized.
template <typename T>
Tensor<T> softmax_cross_entropy(Tape<T>& tape, const Tensor<T>& logits, std::span<const int> labels);

/// y[n,c,:,:] = x[n,c,:,:] * g[n,c]
template <typename T>
Tensor<T> scale_channels(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& g);

}  // namespace sslse::ad
