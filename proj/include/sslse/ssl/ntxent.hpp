#pragma once

#include "sslse/autodiff/tape.hpp"
#include "sslse/autodiff/tensor.hpp"

namespace sslse::ssl {

struct NtXentConfig {
  double temperature = 0.5;
};

/// Normalized temperature-scaled cross entropy over a 2N x d matrix of unit
/// rows where rows 2k and 2k+1 are the positive pair of sample k:
///
///   loss = 1/(2N) sum_i -log( exp(s(i, p(i))) / sum_{k != i} exp(s(i, k)) ),
///   s(i, k) = z_i . z_k / temperature.
///
/// Errors: NonUnitRows (|norm - 1| > 1e-4), NonPositiveTemperature,
/// ShapeMismatch (odd or zero row count).
template <typename T>
ad::Tensor<T> nt_xent_loss(ad::Tape<T>& tape, const ad::Tensor<T>& z, double temperature);

}  // namespace sslse::ssl
