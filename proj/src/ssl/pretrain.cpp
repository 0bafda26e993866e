#include "sslse/ssl/pretrain.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "json.hpp"
#include "sslse/autodiff/ops.hpp"
#include "sslse/error.hpp"
#include "sslse/parallel.hpp"

namespace sslse::ssl {

void PretrainConfig::validate() const {
  if (epochs < 1) throw Error(Errc::InvalidSpec, "pretrain epochs must be >= 1");
  if (batch_size < 1) throw Error(Errc::InvalidSpec, "pretrain batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(Errc::InvalidSpec, "pretrain learning_rate must be > 0");
  if (!(loss.temperature > 0.0)) throw Error(Errc::NonPositiveTemperature, "temperature must be > 0");
  augment.validate();
  encoder.validate();
}

PretrainState start_pretrain(const PretrainConfig& cfg) {
  cfg.validate();
  PretrainState state;
  state.params = model::init_params<float>(cfg.encoder, cfg.seed);
  state.rng = Rng(derive_seed(cfg.seed, 0x5051));
  return state;
}

std::vector<ad::Tensor<float>> pretrain_parameters(const model::ParamSet<float>& params) {
  auto out = params.with_prefix(model::kEncoderPrefix);
  auto proj = params.with_prefix(model::kProjectionPrefix);
  out.insert(out.end(), proj.begin(), proj.end());
  return out;
}

ad::Tensor<float> stack_images(std::span<const FloatImage> images) {
  if (images.empty()) throw Error(Errc::EmptyDataset, "no images to stack");
  const auto& first = images.front();
  const std::size_t per = first.data.size();
  ad::Tensor<float> out(ad::Shape{images.size(), first.channels, first.height, first.width});
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    if (img.channels != first.channels || img.height != first.height || img.width != first.width) {
      throw Error(Errc::ShapeMismatch, "images in a batch differ in size");
    }
    std::copy(img.data.begin(), img.data.end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * per));
  }
  return out;
}

void continue_pretrain(PretrainState& state, std::span<const imaging::EegImage> dataset, const PretrainConfig& cfg,
                       const PretrainHooks& hooks) {
  cfg.validate();
  if (dataset.empty()) throw Error(Errc::EmptyDataset, "pretraining needs at least one image");
  for (const auto& img : dataset) {
    if (img.height() != dataset.front().height() || img.width() != dataset.front().width()) {
      throw Error(Errc::ShapeMismatch, "pretraining images differ in size");
    }
  }
  auto warn = [&](std::string_view msg) {
    if (hooks.on_warning) hooks.on_warning(msg);
  };

  std::size_t batch = cfg.batch_size;
  if (batch > dataset.size()) {
    warn("batch_size " + std::to_string(batch) + " exceeds dataset size " + std::to_string(dataset.size()) +
         "; using " + std::to_string(dataset.size()));
    batch = dataset.size();
  }
  if (batch < 2) warn("batch of one sample: the contrastive loss is identically zero");

  auto params = pretrain_parameters(state.params);
  const ad::AdamOptions adam{cfg.learning_rate};
  const std::size_t batches = dataset.size() / batch;

  while (state.epoch < cfg.epochs) {
    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t epoch_seed = state.rng.next();
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(epoch_seed, 0));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<FloatImage> views(2 * batch);
      parallel_for(batch, [&](std::size_t k) {
        const std::size_t position = b * batch + k;
        Rng stream(derive_seed(epoch_seed, position + 1));
        auto [va, vb] = augment_pair(dataset[order[position]], cfg.augment, stream);
        views[2 * k] = std::move(va);
        views[2 * k + 1] = std::move(vb);
      });
      const auto input = stack_images(views);
      views.clear();

      for (auto& p : params) p.set_requires_grad(true);
      ad::Tape<float> tape;
      const auto h = model::encoder_forward(tape, input, cfg.encoder, state.params);
      const auto z = model::project(tape, h, state.params);
      const auto loss = nt_xent_loss(tape, z, cfg.loss.temperature);
      tape.backward(loss);
      ad::adam_step(std::span<ad::Tensor<float>>(params), state.adam, adam);
      for (auto& p : params) p.zero_grad();
      loss_sum += static_cast<double>(loss.item());
    }

    state.epoch += 1;
    EpochRecord record;
    record.epoch = state.epoch;
    record.mean_loss = batches ? loss_sum / static_cast<double>(batches) : 0.0;
    record.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    state.history.push_back(record);
    if (hooks.on_epoch) hooks.on_epoch(state, record);
  }
  state.params.set_requires_grad(false);
}

PretrainState pretrain(std::span<const imaging::EegImage> dataset, const PretrainConfig& cfg,
                       const PretrainHooks& hooks) {
  PretrainState state = start_pretrain(cfg);
  continue_pretrain(state, dataset, cfg, hooks);
  return state;
}

std::string epoch_json(const EpochRecord& record) {
  nlohmann::ordered_json j;
  j["epoch"] = record.epoch;
  j["mean_loss"] = record.mean_loss;
  j["wall_ms"] = record.wall_ms;
  return j.dump();
}

}  // namespace sslse::ssl
