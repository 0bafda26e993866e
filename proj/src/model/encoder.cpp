#include "sslse/model/encoder.hpp"

#include <cmath>
#include <string>

#include "sslse/autodiff/ops.hpp"
#include "sslse/error.hpp"
#include "sslse/rng.hpp"

namespace sslse::model {

namespace {

std::string block_prefix(std::size_t stage, std::size_t block) {
  return "encoder.stage" + std::to_string(stage) + ".block" + std::to_string(block) + ".";
}

std::string stage_prefix(std::size_t stage) { return "encoder.stage" + std::to_string(stage) + "."; }

template <typename T>
ad::Tensor<T> he_normal(const std::string& name, ad::Shape shape, std::size_t fan_in, std::uint64_t seed) {
  Rng rng(derive_seed(seed, fnv1a64(name)));
  const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
  ad::Tensor<T> t(std::move(shape));
  for (auto& v : t.data()) v = static_cast<T>(rng.normal() * std_dev);
  return t;
}

template <typename T>
void add_conv(ParamSet<T>& params, const std::string& name, std::size_t out_c, std::size_t in_c, std::size_t k,
              std::uint64_t seed) {
  params.add(name + ".weight", he_normal<T>(name + ".weight", {out_c, in_c, k, k}, in_c * k * k, seed));
  params.add(name + ".bias", ad::Tensor<T>(ad::Shape{out_c}));
}

template <typename T>
void add_dense(ParamSet<T>& params, const std::string& name, std::size_t in, std::size_t out, std::uint64_t seed) {
  params.add(name + ".weight", he_normal<T>(name + ".weight", {in, out}, in, seed));
  params.add(name + ".bias", ad::Tensor<T>(ad::Shape{out}));
}

template <typename T>
ad::Tensor<T> conv(ad::Tape<T>& tape, const ad::Tensor<T>& x, const ParamSet<T>& params, const std::string& name,
                   std::size_t stride, std::size_t padding) {
  return ad::conv2d(tape, x, params.at(name + ".weight"), params.at(name + ".bias"),
                    ad::Conv2dOptions{stride, padding});
}

}  // namespace

void EncoderConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidSpec, "encoder config: " + msg); };
  if (input_channels == 0) fail("input_channels must be >= 1");
  if (stem_kernel == 0 || stem_stride == 0) fail("stem_kernel and stem_stride must be >= 1");
  if (stage_channels.empty()) fail("stage_channels must not be empty");
  for (std::size_t c : stage_channels) {
    if (c == 0) fail("stage widths must be >= 1");
  }
  if (blocks_per_stage == 0) fail("blocks_per_stage must be >= 1");
  if (se_ratio == 0) fail("se_ratio must be >= 1");
  if (embedding_dim != stage_channels.back()) {
    fail("embedding_dim " + std::to_string(embedding_dim) + " must equal the last stage width " +
         std::to_string(stage_channels.back()));
  }
  if (projection_hidden == 0 || projection_dim == 0) fail("projection widths must be >= 1");
  if (num_classes == 0) fail("num_classes must be >= 1");
}

std::size_t EncoderConfig::se_hidden(std::size_t channels) const noexcept {
  const std::size_t h = channels / se_ratio;
  return h == 0 ? 1 : h;
}

template <typename T>
ad::Tensor<T> se_gate(ad::Tape<T>& tape, const ad::Tensor<T>& x, const SeBlockParams<T>& p) {
  const auto squeezed = ad::global_avg_pool(tape, x);
  const auto hidden = ad::relu(tape, ad::dense(tape, squeezed, p.fc1_weight, p.fc1_bias));
  return ad::sigmoid(tape, ad::dense(tape, hidden, p.fc2_weight, p.fc2_bias));
}

template <typename T>
ad::Tensor<T> se_forward(ad::Tape<T>& tape, const ad::Tensor<T>& x, const SeBlockParams<T>& p) {
  return ad::scale_channels(tape, x, se_gate(tape, x, p));
}

template <typename T>
SeBlockParams<T> se_params(const ParamSet<T>& params, std::size_t stage, std::size_t block) {
  const std::string base = block_prefix(stage, block) + "se.";
  return SeBlockParams<T>{params.at(base + "fc1.weight"), params.at(base + "fc1.bias"),
                          params.at(base + "fc2.weight"), params.at(base + "fc2.bias")};
}

template <typename T>
ParamSet<T> init_params(const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ParamSet<T> params;
  add_conv(params, "encoder.stem", cfg.stage_channels[0], cfg.input_channels, cfg.stem_kernel, seed);
  for (std::size_t s = 0; s < cfg.stage_channels.size(); ++s) {
    const std::size_t c = cfg.stage_channels[s];
    if (s > 0) add_conv(params, stage_prefix(s) + "down", c, cfg.stage_channels[s - 1], 2, seed);
    for (std::size_t b = 0; b < cfg.blocks_per_stage; ++b) {
      const std::string base = block_prefix(s, b);
      add_conv(params, base + "conv1", c, c, 3, seed);
      add_conv(params, base + "conv2", c, c, 3, seed);
      add_dense(params, base + "se.fc1", c, cfg.se_hidden(c), seed);
      add_dense(params, base + "se.fc2", cfg.se_hidden(c), c, seed);
    }
  }
  add_dense(params, "projection.fc1", cfg.embedding_dim, cfg.projection_hidden, seed);
  add_dense(params, "projection.fc2", cfg.projection_hidden, cfg.projection_dim, seed);
  add_dense(params, "head", cfg.embedding_dim, cfg.num_classes, seed);
  return params;
}

template <typename T>
void init_head(ParamSet<T>& params, const EncoderConfig& cfg, std::uint64_t seed, bool zero) {
  ad::Tensor<T> weight = zero ? ad::Tensor<T>(ad::Shape{cfg.embedding_dim, cfg.num_classes})
                              : he_normal<T>("head.weight", {cfg.embedding_dim, cfg.num_classes}, cfg.embedding_dim, seed);
  ad::Tensor<T> bias(ad::Shape{cfg.num_classes});
  if (params.contains("head.weight")) {
    params.at("head.weight") = weight;
    params.at("head.bias") = bias;
  } else {
    params.add("head.weight", weight);
    params.add("head.bias", bias);
  }
}

template <typename T>
ad::Tensor<T> encoder_forward(ad::Tape<T>& tape, const ad::Tensor<T>& images, const EncoderConfig& cfg,
                              const ParamSet<T>& params) {
  if (images.rank() != 4 || images.dim(1) != cfg.input_channels) {
    throw Error(Errc::ShapeMismatch, "encoder_forward: expected N x " + std::to_string(cfg.input_channels) +
                                         " x H x W, got " + ad::shape_string(images.shape()));
  }
  ad::Tensor<T> x = ad::relu(tape, conv(tape, images, params, "encoder.stem", cfg.stem_stride, 0));
  for (std::size_t s = 0; s < cfg.stage_channels.size(); ++s) {
    if (s > 0) x = ad::relu(tape, conv(tape, x, params, stage_prefix(s) + "down", 2, 0));
    for (std::size_t b = 0; b < cfg.blocks_per_stage; ++b) {
      const std::string base = block_prefix(s, b);
      ad::Tensor<T> h = ad::relu(tape, conv(tape, x, params, base + "conv1", 1, 1));
      h = conv(tape, h, params, base + "conv2", 1, 1);
      if (cfg.se_enabled) h = se_forward(tape, h, se_params(params, s, b));
      x = ad::relu(tape, ad::add(tape, x, h));
    }
  }
  return ad::global_avg_pool(tape, x);
}

template <typename T>
ad::Tensor<T> project(ad::Tape<T>& tape, const ad::Tensor<T>& embeddings, const ParamSet<T>& params) {
  const auto hidden = ad::relu(
      tape, ad::dense(tape, embeddings, params.at("projection.fc1.weight"), params.at("projection.fc1.bias")));
  return ad::l2_normalize(
      tape, ad::dense(tape, hidden, params.at("projection.fc2.weight"), params.at("projection.fc2.bias")));
}

template <typename T>
ad::Tensor<T> classify(ad::Tape<T>& tape, const ad::Tensor<T>& embeddings, const ParamSet<T>& params) {
  return ad::dense(tape, embeddings, params.at("head.weight"), params.at("head.bias"));
}

#define SSLSE_INSTANTIATE_MODEL(T)                                                                          \
  template ad::Tensor<T> se_gate(ad::Tape<T>&, const ad::Tensor<T>&, const SeBlockParams<T>&);              \
  template ad::Tensor<T> se_forward(ad::Tape<T>&, const ad::Tensor<T>&, const SeBlockParams<T>&);           \
  template SeBlockParams<T> se_params(const ParamSet<T>&, std::size_t, std::size_t);                        \
  template ParamSet<T> init_params(const EncoderConfig&, std::uint64_t);                                    \
  template void init_head(ParamSet<T>&, const EncoderConfig&, std::uint64_t, bool);                         \
  template ad::Tensor<T> encoder_forward(ad::Tape<T>&, const ad::Tensor<T>&, const EncoderConfig&,          \
                                         const ParamSet<T>&);                                               \
  template ad::Tensor<T> project(ad::Tape<T>&, const ad::Tensor<T>&, const ParamSet<T>&);                   \
  template ad::Tensor<T> classify(ad::Tape<T>&, const ad::Tensor<T>&, const ParamSet<T>&);

SSLSE_INSTANTIATE_MODEL(float)
SSLSE_INSTANTIATE_MODEL(double)

#undef SSLSE_INSTANTIATE_MODEL

}  // namespace sslse::model
