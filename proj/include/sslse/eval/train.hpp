#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sslse/eval/metrics.hpp"
#include "sslse/imaging/encode.hpp"
#include "sslse/model/encoder.hpp"
#include "sslse/ssl/pretrain.hpp"

namespace sslse::eval {

struct FinetuneConfig {
  /// Share of the images treated as labeled; labeled_count overrides it.
  double labeled_fraction = 1.0;
  std::optional<std::size_t> labeled_count;
  /// Share of the labeled subset held out for evaluation (stratified).
  double holdout_fraction = 0.2;
  std::size_t epochs = 50;
  double learning_rate = 1e-2;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  bool freeze_encoder = true;
  bool zero_init_head = false;
  /// End-to-end training of the supervised baseline.
  std::size_t supervised_epochs = 20;
  double supervised_learning_rate = 1e-3;

  void validate() const;
};

/// Indices into the image collection handed to finetune / train_supervised.
struct SplitPlan {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> train;
  std::vector<std::size_t> heldout;
};

/// Stratified, seeded selection of the labeled subset followed by a
/// stratified train / held-out split of it. Class quotas use largest
/// remainders, so the labeled subset has exactly the requested size.
/// Errors: MissingLabels, LabelOutOfRange, SingleClassSplit.
SplitPlan plan_split(std::span<const imaging::EegImage> images, std::size_t num_classes, const FinetuneConfig& cfg);

struct TrainResult {
  model::ParamSet<float> params;
  MetricsReport report;
  SplitPlan plan;
};

/// Trains the classification head on top of `params`' encoder and reports
/// metrics on the held-out split. The caller's parameters are never modified.
/// With freeze_encoder the encoder tensors in the result are bit-identical to
/// the input and the head is trained on cached embeddings; otherwise encoder
/// and head are trained end to end.
TrainResult finetune(const model::ParamSet<float>& params, const model::EncoderConfig& encoder,
                     std::span<const imaging::EegImage> images, const FinetuneConfig& cfg);

/// Encoder + head from scratch with cross-entropy (no projection head).
TrainResult train_supervised(std::span<const imaging::EegImage> images, const model::EncoderConfig& encoder,
                             const FinetuneConfig& cfg);

/// Adam on softmax cross-entropy over the head parameters only, with
/// `features` (N x D) standing in for encoder output.
void train_linear_head(model::ParamSet<float>& params, const ad::Tensor<float>& features,
                       std::span<const int> labels, const FinetuneConfig& cfg);

/// Row-wise argmax of N x K logits against `truth`.
ConfusionMatrix confusion_from_logits(const ad::Tensor<float>& logits, std::span<const int> truth);

/// Inference-mode embeddings, N x D, in index order.
ad::Tensor<float> embed(const model::ParamSet<float>& params, const model::EncoderConfig& encoder,
                        std::span<const imaging::EegImage> images, std::span<const std::size_t> indices);

ConfusionMatrix evaluate(const model::ParamSet<float>& params, const model::EncoderConfig& encoder,
                         std::span<const imaging::EegImage> images, std::span<const std::size_t> indices);

std::string condition_tag(bool se_enabled, bool self_supervised);

struct AblationConfig {
  ssl::PretrainConfig pretrain;  // pretrain.encoder is the base architecture
  FinetuneConfig finetune;
};

struct AblationCell {
  bool se_enabled = false;
  bool self_supervised = false;
  MetricsReport report;
  std::vector<std::size_t> heldout;
  /// Flat JSON object of every setting that shaped this cell.
  std::string config_json;
};

struct AblationReport {
  std::vector<AblationCell> cells;

  const AblationCell& cell(bool se_enabled, bool self_supervised) const;
  std::string table() const;
  /// Array of cells: metrics fields plus "heldout" indices and "config".
  std::string to_json() const;
};

std::string ablation_cell_config(const AblationConfig& cfg, bool se_enabled, bool self_supervised);

/// The 2 x 2 grid {SE on, off} x {pretrain + finetune, supervised} with the
/// same seeds and split in every cell.
AblationReport run_ablation(std::span<const imaging::EegImage> images, const AblationConfig& cfg);

/// Pretrains on corpus A (labels ignored), then finetunes on B. The head is
/// sized for target_classes.
TrainResult run_transfer(std::span<const imaging::EegImage> corpus_a, std::span<const imaging::EegImage> corpus_b,
                         const AblationConfig& cfg, std::size_t target_classes);

}  // namespace sslse::eval
