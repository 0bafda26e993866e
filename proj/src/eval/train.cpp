#include "sslse/eval/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <iomanip>

#include "json.hpp"
#include "sslse/autodiff/ops.hpp"
#include "sslse/autodiff/optim.hpp"
#include "sslse/error.hpp"
#include "sslse/rng.hpp"

namespace sslse::eval {

namespace {

constexpr std::size_t kInferenceBatch = 64;

std::vector<int> labels_of(std::span<const imaging::EegImage> images, std::span<const std::size_t> indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(*images[i].label);
  return out;
}

ad::Tensor<float> image_batch(std::span<const imaging::EegImage> images, std::span<const std::size_t> indices) {
  std::vector<ssl::FloatImage> planar;
  planar.reserve(indices.size());
  for (std::size_t i : indices) planar.push_back(ssl::to_float(images[i].image));
  return ssl::stack_images(planar);
}

std::size_t distinct(std::span<const imaging::EegImage> images, std::span<const std::size_t> indices) {
  std::set<int> seen;
  for (std::size_t i : indices) seen.insert(*images[i].label);
  return seen.size();
}

// Splits `total` into per-class quotas proportional to `sizes` (largest
// remainder, ties to the lower class id).
std::vector<std::size_t> proportional_quota(const std::vector<std::size_t>& sizes, std::size_t total) {
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<std::size_t> quota(sizes.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const double exact = static_cast<double>(sizes[c]) * static_cast<double>(total) / static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i) {
    const std::size_t c = remainders[i].second;
    if (quota[c] < sizes[c]) {
      quota[c] += 1;
      assigned += 1;
    }
  }
  return quota;
}

void train_end_to_end(model::ParamSet<float>& params, const model::EncoderConfig& encoder,
                      std::span<const imaging::EegImage> images, std::span<const std::size_t> train,
                      std::size_t epochs, double learning_rate, std::size_t batch_size, std::uint64_t seed) {
  auto trainable = params.with_prefix(model::kEncoderPrefix);
  auto head = params.with_prefix(model::kHeadPrefix);
  trainable.insert(trainable.end(), head.begin(), head.end());
  ad::AdamState<float> adam;
  Rng rng(derive_seed(seed, 0xE2E));
  std::vector<std::size_t> order(train.begin(), train.end());
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const auto input = image_batch(images, idx);
      const auto labels = labels_of(images, idx);
      for (auto& p : trainable) p.set_requires_grad(true);
      ad::Tape<float> tape;
      const auto logits = model::classify(tape, model::encoder_forward(tape, input, encoder, params), params);
      const auto loss = ad::softmax_cross_entropy(tape, logits, labels);
      tape.backward(loss);
      ad::adam_step(std::span<ad::Tensor<float>>(trainable), adam, ad::AdamOptions{learning_rate});
      for (auto& p : trainable) p.zero_grad();
    }
  }
  params.set_requires_grad(false);
}

}  // namespace

void train_linear_head(model::ParamSet<float>& params, const ad::Tensor<float>& features,
                       std::span<const int> labels, const FinetuneConfig& cfg) {
  auto head = params.with_prefix(model::kHeadPrefix);
  ad::AdamState<float> adam;
  Rng rng(derive_seed(cfg.seed, 0x4EAD));
  const std::size_t n = features.dim(0), d = features.dim(1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      ad::Tensor<float> x(ad::Shape{end - start, d});
      std::vector<int> y;
      for (std::size_t r = start; r < end; ++r) {
        std::copy_n(features.data().begin() + static_cast<std::ptrdiff_t>(order[r] * d), d,
                    x.data().begin() + static_cast<std::ptrdiff_t>((r - start) * d));
        y.push_back(labels[order[r]]);
      }
      for (auto& p : head) p.set_requires_grad(true);
      ad::Tape<float> tape;
      const auto loss = ad::softmax_cross_entropy(tape, model::classify(tape, x, params), y);
      tape.backward(loss);
      ad::adam_step(std::span<ad::Tensor<float>>(head), adam, ad::AdamOptions{cfg.learning_rate});
      for (auto& p : head) p.zero_grad();
    }
  }
  params.set_requires_grad(false);
}

ConfusionMatrix confusion_from_logits(const ad::Tensor<float>& logits, std::span<const int> truth) {
  const std::size_t k = logits.dim(1);
  ConfusionMatrix cm(k);
  for (std::size_t r = 0; r < logits.dim(0); ++r) {
    cm.add(truth[r], argmax(logits.data().subspan(r * k, k)));
  }
  return cm;
}

void FinetuneConfig::validate() const {
  if (!(labeled_fraction > 0.0 && labeled_fraction <= 1.0)) {
    throw Error(Errc::InvalidSpec, "labeled_fraction must lie in (0, 1]");
  }
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw Error(Errc::InvalidSpec, "holdout_fraction must lie in (0, 1)");
  }
  if (batch_size < 1) throw Error(Errc::InvalidSpec, "finetune batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !(supervised_learning_rate > 0.0)) {
    throw Error(Errc::InvalidSpec, "learning rates must be > 0");
  }
}

SplitPlan plan_split(std::span<const imaging::EegImage> images, std::size_t num_classes, const FinetuneConfig& cfg) {
  cfg.validate();
  if (images.empty()) throw Error(Errc::EmptyDataset, "no images to split");
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!images[i].label) {
      throw Error(Errc::MissingLabels, "image " + std::to_string(i) + " (" + images[i].source_id + ") has no label");
    }
    const int label = *images[i].label;
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(label) + " outside " + std::to_string(num_classes) +
                                             " classes");
    }
    by_class[static_cast<std::size_t>(label)].push_back(i);
  }

  const std::size_t want = cfg.labeled_count.value_or(
      static_cast<std::size_t>(std::llround(cfg.labeled_fraction * static_cast<double>(images.size()))));
  if (want > images.size()) {
    throw Error(Errc::InvalidSpec, "labeled_count " + std::to_string(want) + " exceeds dataset size " +
                                       std::to_string(images.size()));
  }
  std::vector<std::size_t> sizes;
  for (const auto& c : by_class) sizes.push_back(c.size());
  const auto quota = proportional_quota(sizes, want);

  SplitPlan plan;
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto members = by_class[c];
    Rng rng(derive_seed(cfg.seed, 0x5000 + c));
    rng.shuffle(std::span<std::size_t>(members));
    members.resize(quota[c]);
    std::size_t held = static_cast<std::size_t>(std::llround(cfg.holdout_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) held = std::clamp<std::size_t>(held, 1, members.size() - 1);
    else held = 0;
    plan.heldout.insert(plan.heldout.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(held));
    plan.train.insert(plan.train.end(), members.begin() + static_cast<std::ptrdiff_t>(held), members.end());
    plan.labeled.insert(plan.labeled.end(), members.begin(), members.end());
  }
  std::sort(plan.labeled.begin(), plan.labeled.end());
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.heldout.begin(), plan.heldout.end());

  if (distinct(images, plan.train) < 2 || distinct(images, plan.heldout) < 2) {
    throw Error(Errc::SingleClassSplit, "train (" + std::to_string(distinct(images, plan.train)) + ") or held-out (" +
                                            std::to_string(distinct(images, plan.heldout)) +
                                            ") split covers fewer than 2 classes");
  }
  return plan;
}

ad::Tensor<float> embed(const model::ParamSet<float>& params, const model::EncoderConfig& encoder,
                        std::span<const imaging::EegImage> images, std::span<const std::size_t> indices) {
  ad::Tensor<float> out(ad::Shape{indices.size(), encoder.embedding_dim});
  for (std::size_t start = 0; start < indices.size(); start += kInferenceBatch) {
    const std::size_t end = std::min(indices.size(), start + kInferenceBatch);
    ad::Tape<float> tape(false);
    const auto h = model::encoder_forward(tape, image_batch(images, indices.subspan(start, end - start)), encoder, params);
    std::copy(h.data().begin(), h.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(start * encoder.embedding_dim));
  }
  return out;
}

ConfusionMatrix evaluate(const model::ParamSet<float>& params, const model::EncoderConfig& encoder,
                         std::span<const imaging::EegImage> images, std::span<const std::size_t> indices) {
  const auto features = embed(params, encoder, images, indices);
  ad::Tape<float> tape(false);
  return confusion_from_logits(model::classify(tape, features, params), labels_of(images, indices));
}

std::string condition_tag(bool se_enabled, bool self_supervised) {
  return std::string(se_enabled ? "SE" : "NoSE") + (self_supervised ? "+SSL" : "+Supervised");
}

TrainResult finetune(const model::ParamSet<float>& params, const model::EncoderConfig& encoder,
                     std::span<const imaging::EegImage> images, const FinetuneConfig& cfg) {
  encoder.validate();
  TrainResult result;
  result.plan = plan_split(images, encoder.num_classes, cfg);
  result.params = params.clone();
  model::init_head(result.params, encoder, cfg.seed, cfg.zero_init_head);

  if (cfg.freeze_encoder) {
    const auto features = embed(result.params, encoder, images, result.plan.train);
    train_linear_head(result.params, features, labels_of(images, result.plan.train), cfg);
  } else {
    train_end_to_end(result.params, encoder, images, result.plan.train, cfg.epochs, cfg.learning_rate,
                     cfg.batch_size, cfg.seed);
  }
  result.report = compute_metrics(evaluate(result.params, encoder, images, result.plan.heldout));
  result.report.condition = condition_tag(encoder.se_enabled, true);
  result.report.seed = cfg.seed;
  return result;
}

TrainResult train_supervised(std::span<const imaging::EegImage> images, const model::EncoderConfig& encoder,
                             const FinetuneConfig& cfg) {
  TrainResult result;
  result.plan = plan_split(images, encoder.num_classes, cfg);
  result.params = model::init_params<float>(encoder, cfg.seed);
  train_end_to_end(result.params, encoder, images, result.plan.train, cfg.supervised_epochs,
                   cfg.supervised_learning_rate, cfg.batch_size, cfg.seed);
  result.report = compute_metrics(evaluate(result.params, encoder, images, result.plan.heldout));
  result.report.condition = condition_tag(encoder.se_enabled, false);
  result.report.seed = cfg.seed;
  return result;
}

const AblationCell& AblationReport::cell(bool se_enabled, bool self_supervised) const {
  for (const auto& c : cells) {
    if (c.se_enabled == se_enabled && c.self_supervised == self_supervised) return c;
  }
  throw Error(Errc::MissingInput, "no ablation cell " + condition_tag(se_enabled, self_supervised));
}

std::string AblationReport::table() const {
  std::ostringstream out;
  out << std::left << std::setw(18) << "condition" << std::right << std::setw(10) << "acc (%)" << std::setw(10)
      << "macro F1" << std::setw(8) << "n" << '\n';
  for (const auto& c : cells) {
    out << std::left << std::setw(18) << c.report.condition << std::right << std::fixed << std::setprecision(2)
        << std::setw(10) << 100.0 * c.report.accuracy << std::setprecision(4) << std::setw(10) << c.report.macro_f1
        << std::setw(8) << c.report.n << '\n';
  }
  return out.str();
}

std::string AblationReport::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    auto cell = nlohmann::ordered_json::parse(c.report.to_json());
    cell["heldout"] = c.heldout;
    cell["config"] = nlohmann::ordered_json::parse(c.config_json);
    j.push_back(std::move(cell));
  }
  return j.dump();
}

std::string ablation_cell_config(const AblationConfig& cfg, bool se_enabled, bool self_supervised) {
  const auto& e = cfg.pretrain.encoder;
  const auto& p = cfg.pretrain;
  const auto& f = cfg.finetune;
  nlohmann::ordered_json j;
  j["mode"] = self_supervised ? "ssl" : "supervised";
  j["se_enabled"] = se_enabled;
  j["stage_channels"] = e.stage_channels;
  j["blocks_per_stage"] = e.blocks_per_stage;
  j["se_ratio"] = e.se_ratio;
  j["stem_kernel"] = e.stem_kernel;
  j["stem_stride"] = e.stem_stride;
  j["num_classes"] = e.num_classes;
  j["embedding_dim"] = e.embedding_dim;
  j["projection_hidden"] = e.projection_hidden;
  j["projection_dim"] = e.projection_dim;
  j["pretrain_seed"] = p.seed;
  j["pretrain_epochs"] = p.epochs;
  j["pretrain_batch_size"] = p.batch_size;
  j["pretrain_learning_rate"] = p.learning_rate;
  j["temperature"] = p.loss.temperature;
  j["finetune_seed"] = f.seed;
  j["labeled_fraction"] = f.labeled_fraction;
  j["labeled_count"] = f.labeled_count ? nlohmann::ordered_json(*f.labeled_count) : nlohmann::ordered_json(nullptr);
  j["holdout_fraction"] = f.holdout_fraction;
  j["finetune_epochs"] = f.epochs;
  j["finetune_learning_rate"] = f.learning_rate;
  j["finetune_batch_size"] = f.batch_size;
  j["supervised_epochs"] = f.supervised_epochs;
  j["supervised_learning_rate"] = f.supervised_learning_rate;
  return j.dump();
}

AblationReport run_ablation(std::span<const imaging::EegImage> images, const AblationConfig& cfg) {
  AblationReport report;
  for (bool se : {true, false}) {
    ssl::PretrainConfig pre = cfg.pretrain;
    pre.encoder.se_enabled = se;
    const auto state = ssl::pretrain(images, pre);
    auto ssl_result = finetune(state.params, pre.encoder, images, cfg.finetune);
    report.cells.push_back(
        AblationCell{se, true, ssl_result.report, ssl_result.plan.heldout, ablation_cell_config(cfg, se, true)});

    auto sl_result = train_supervised(images, pre.encoder, cfg.finetune);
    report.cells.push_back(
        AblationCell{se, false, sl_result.report, sl_result.plan.heldout, ablation_cell_config(cfg, se, false)});
  }
  return report;
}

TrainResult run_transfer(std::span<const imaging::EegImage> corpus_a, std::span<const imaging::EegImage> corpus_b,
                         const AblationConfig& cfg, std::size_t target_classes) {
  const auto state = ssl::pretrain(corpus_a, cfg.pretrain);
  model::EncoderConfig target = cfg.pretrain.encoder;
  target.num_classes = target_classes;
  auto result = finetune(state.params, target, corpus_b, cfg.finetune);
  result.report.condition = "transfer";
  return result;
}

}  // namespace sslse::eval
