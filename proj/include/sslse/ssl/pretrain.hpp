#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sslse/autodiff/optim.hpp"
#include "sslse/imaging/encode.hpp"
#include "sslse/model/encoder.hpp"
#include "sslse/rng.hpp"
#include "sslse/ssl/augment.hpp"
#include "sslse/ssl/ntxent.hpp"

namespace sslse::ssl {

struct PretrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  AugmentationSpec augment = AugmentationSpec::default_chain();
  NtXentConfig loss;
  model::EncoderConfig encoder;
  /// Epochs between checkpoints; 0 disables periodic checkpoints.
  std::size_t checkpoint_every = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double wall_ms = 0.0;
};

/// Everything needed to continue training exactly where it stopped.
struct PretrainState {
  model::ParamSet<float> params;
  ad::AdamState<float> adam;
  std::size_t epoch = 0;  // completed epochs
  Rng rng;
  std::vector<EpochRecord> history;
};

struct PretrainHooks {
  std::function<void(const PretrainState&, const EpochRecord&)> on_epoch;
  std::function<void(std::string_view)> on_warning;
};

/// Fresh parameters and optimizer state; the master stream is seeded from cfg.seed.
PretrainState start_pretrain(const PretrainConfig& cfg);

/// Runs epochs until state.epoch == cfg.epochs. Each epoch draws one seed from
/// the master stream, shuffles the dataset with it, and derives one
/// augmentation stream per batch position, so results do not depend on the
/// worker count. The trailing incomplete batch is dropped.
/// Errors: EmptyDataset, ShapeMismatch (mixed image sizes).
void continue_pretrain(PretrainState& state, std::span<const imaging::EegImage> dataset, const PretrainConfig& cfg,
                       const PretrainHooks& hooks = {});

/// start_pretrain + continue_pretrain.
PretrainState pretrain(std::span<const imaging::EegImage> dataset, const PretrainConfig& cfg,
                       const PretrainHooks& hooks = {});

/// Names of the tensors the contrastive stage optimizes (encoder + projection).
std::vector<ad::Tensor<float>> pretrain_parameters(const model::ParamSet<float>& params);

/// Stacks planar images into an N x C x H x W tensor.
ad::Tensor<float> stack_images(std::span<const FloatImage> images);

/// JSON line {"epoch", "mean_loss", "wall_ms"}.
std::string epoch_json(const EpochRecord& record);

}  // namespace sslse::ssl
