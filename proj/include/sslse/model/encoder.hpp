#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sslse/autodiff/tape.hpp"
#include "sslse/autodiff/tensor.hpp"
#include "sslse/model/params.hpp"

namespace sslse::model {

/// Architecture of the SE-augmented residual encoder and its heads.
///
/// Layout: a patchifying stem conv (stem_kernel, stride stem_stride), then
/// one stage per entry of stage_channels. Stages after the first open with a
/// 2x2 stride-2 transition conv that halves the spatial size and changes the
/// width. Each stage holds blocks_per_stage residual blocks:
///
///   y = relu(x + SE(conv3x3(relu(conv3x3(x)))))
///
/// with SE replaced by identity when se_enabled is false. A global average
/// pool then yields the embedding of width stage_channels.back().
struct EncoderConfig {
  std::size_t input_channels = 3;
  std::size_t stem_kernel = 4;
  std::size_t stem_stride = 4;
  std::vector<std::size_t> stage_channels{16, 32, 64, 128};
  std::size_t blocks_per_stage = 1;
  bool se_enabled = true;
  std::size_t se_ratio = 8;
  std::size_t embedding_dim = 128;
  std::size_t projection_hidden = 128;
  std::size_t projection_dim = 64;
  std::size_t num_classes = 2;

  /// Throws InvalidSpec when a width is zero, se_ratio < 1 or embedding_dim
  /// differs from the last stage width.
  void validate() const;

  /// max(1, floor(channels / se_ratio))
  std::size_t se_hidden(std::size_t channels) const noexcept;
};

template <typename T>
struct SeBlockParams {
  ad::Tensor<T> fc1_weight;  // C x hidden
  ad::Tensor<T> fc1_bias;    // hidden
  ad::Tensor<T> fc2_weight;  // hidden x C
  ad::Tensor<T> fc2_bias;    // C
};

/// Squeeze (global average pool), excitation (dense-relu-dense-sigmoid) and
/// recalibration (channel-wise rescale of x by the gate).
template <typename T>
ad::Tensor<T> se_forward(ad::Tape<T>& tape, const ad::Tensor<T>& x, const SeBlockParams<T>& p);

/// SE gate values alone, N x C, each in (0, 1).
template <typename T>
ad::Tensor<T> se_gate(ad::Tape<T>& tape, const ad::Tensor<T>& x, const SeBlockParams<T>& p);

/// Aliasing handles to the SE parameters of one residual block.
template <typename T>
SeBlockParams<T> se_params(const ParamSet<T>& params, std::size_t stage, std::size_t block);

/// He-normal weights (std = sqrt(2 / fan_in)) and zero biases. Each tensor is
/// drawn from its own stream keyed by (seed, name), so toggling SE or
/// resizing the heads leaves the remaining tensors unchanged. SE parameters
/// exist even when se_enabled is false.
template <typename T>
ParamSet<T> init_params(const EncoderConfig& cfg, std::uint64_t seed);

/// Replaces the classification head with a fresh D x num_classes layer:
/// zeros when `zero` is set, otherwise He-normal from (seed, name) streams.
template <typename T>
void init_head(ParamSet<T>& params, const EncoderConfig& cfg, std::uint64_t seed, bool zero);

/// images: N x input_channels x H x W with pixels in [0, 1]. Returns N x D.
template <typename T>
ad::Tensor<T> encoder_forward(ad::Tape<T>& tape, const ad::Tensor<T>& images, const EncoderConfig& cfg,
                              const ParamSet<T>& params);

/// Projection head: l2_normalize(dense(relu(dense(h)))).
template <typename T>
ad::Tensor<T> project(ad::Tape<T>& tape, const ad::Tensor<T>& embeddings, const ParamSet<T>& params);

/// Linear classification head, N x D -> N x K logits.
template <typename T>
ad::Tensor<T> classify(ad::Tape<T>& tape, const ad::Tensor<T>& embeddings, const ParamSet<T>& params);

inline constexpr const char* kEncoderPrefix = "encoder.";
inline constexpr const char* kProjectionPrefix = "projection.";
inline constexpr const char* kHeadPrefix = "head.";

}  // namespace sslse::model
