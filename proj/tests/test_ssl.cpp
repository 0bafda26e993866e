#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sslse/autodiff/grad_check.hpp"
#include "sslse/autodiff/ops.hpp"
#include "sslse/error.hpp"
#include "sslse/imaging.hpp"
#include "sslse/ingest.hpp"
#include "sslse/ssl/augment.hpp"
#include "sslse/ssl/ntxent.hpp"
#include "sslse/ssl/pretrain.hpp"
#include "support.hpp"

using namespace sslse;
using namespace sslse::ssl;
using ad::Shape;
using ad::Tape;
using T64 = ad::Tensor<double>;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

double tape_loss(const std::vector<double>& z, std::size_t rows, std::size_t d, double tau) {
  Tape<double> tape(false);
  return nt_xent_loss(tape, T64(Shape{rows, d}, z), tau).item();
}

imaging::EegImage random_image(Rng& rng, std::size_t h, std::size_t w) {
  imaging::EegImage img;
  img.image = imaging::RgbImage{h, w, std::vector<std::uint8_t>(h * w * 3)};
  for (auto& p : img.image.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

std::vector<imaging::EegImage> synthetic_images(std::size_t per_class, std::uint64_t seed, std::size_t side = 32,
                                                double noise = 10.0) {
  ingest::SynthSpec spec;
  spec.windows_per_class = per_class;
  spec.seed = seed;
  spec.window_s = 2.0;
  spec.noise_sigma = noise;
  const auto rec = ingest::synthesize_recording(spec);
  return imaging::encode_recording(rec, ingest::WindowSpec{2.0, 20.0, std::nullopt}, imaging::viridis(),
                                   imaging::EncodeOptions{side, side});
}

PretrainConfig small_pretrain(std::size_t epochs) {
  PretrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  cfg.encoder.stage_channels = {8, 16};
  cfg.encoder.embedding_dim = 16;
  cfg.encoder.projection_hidden = 16;
  cfg.encoder.projection_dim = 8;
  cfg.seed = 3;
  return cfg;
}

std::vector<double> losses(const PretrainState& s) {
  std::vector<double> out;
  for (const auto& r : s.history) out.push_back(r.mean_loss);
  return out;
}

}  // namespace

TEST_CASE("to_float scales bytes into planar floats") {
  imaging::RgbImage img{1, 2, {0, 51, 255, 10, 20, 30}};
  const auto f = to_float(img);
  CHECK(f.channels == 3);
  CHECK(f.at(0, 0, 0) == 0.0f);
  CHECK(f.at(1, 0, 0) == doctest::Approx(0.2f));
  CHECK(f.at(2, 0, 0) == 1.0f);
  CHECK(f.at(0, 0, 1) == doctest::Approx(10.0f / 255.0f));
}

TEST_CASE("an all-zero-probability chain is the identity") {
  Rng rng(1);
  const auto img = random_image(rng, 8, 8);
  AugmentationSpec spec;
  for (auto op : {AugOp::Rotate90, AugOp::GaussianBlur, AugOp::GaussianNoise, AugOp::CropResize, AugOp::Cutout}) {
    spec.steps.push_back(AugStep{op, 0.0, 0.5, 1.0});
  }
  Rng stream(2);
  const auto [a, b] = augment_pair(img, spec, stream);
  CHECK(a == to_float(img.image));
  CHECK(b == to_float(img.image));
  CHECK(error_of([&] { spec.validate(); }) == Errc::InvalidSpec);
}

TEST_CASE("rotations") {
  Rng rng(2);
  const auto src = to_float(random_image(rng, 5, 7).image);
  CHECK(rotate90(rotate90(src, 2), 2) == src);
  CHECK(rotate90(rotate90(rotate90(rotate90(src, 1), 1), 1), 1) == src);
  const auto r = rotate90(src, 1);
  CHECK(r.height == 7);
  CHECK(r.width == 5);
  // counter-clockwise: top-right corner moves to top-left
  CHECK(r.at(0, 0, 0) == src.at(0, 0, 6));
  CHECK(rotate_small(src, 0.0) == src);
}

TEST_CASE("per-op behavior") {
  Rng rng(3);
  const auto src = to_float(random_image(rng, 16, 16).image);
  CHECK(gaussian_blur(src, 0.0) == src);
  FloatImage flat{3, 6, 6, std::vector<float>(108, 0.25f)};
  for (float v : gaussian_blur(flat, 1.5).data) CHECK(v == doctest::Approx(0.25f));

  Rng a(4), b(4);
  const auto noisy = add_gaussian_noise(src, 0.1, a);
  CHECK(noisy == add_gaussian_noise(src, 0.1, b));
  CHECK(noisy != src);
  for (float v : noisy.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }

  Rng c(5);
  CHECK(crop_resize(src, 1.0, c) == src);
  const auto cropped = crop_resize(src, 0.25, c);
  CHECK(cropped.height == 16);
  CHECK(cropped.width == 16);

  Rng d(6);
  const auto cut = cutout(src, 0.5, d);
  std::size_t zeros = 0;
  for (std::size_t y = 0; y < 16; ++y) {
    for (std::size_t x = 0; x < 16; ++x) {
      if (cut.at(0, y, x) == 0.0f && cut.at(1, y, x) == 0.0f && cut.at(2, y, x) == 0.0f) ++zeros;
    }
  }
  CHECK(zeros >= 64);
}

TEST_CASE("augmentation streams are reproducible and views differ") {
  Rng rng(7);
  const auto img = random_image(rng, 16, 16);
  const auto spec = AugmentationSpec::default_chain();
  Rng s1(9), s2(9);
  const auto p1 = augment_pair(img, spec, s1);
  const auto p2 = augment_pair(img, spec, s2);
  CHECK(p1.first == p2.first);
  CHECK(p1.second == p2.second);
  CHECK(p1.first != p1.second);
  CHECK(parse_aug_op(aug_op_name(AugOp::CropResize)) == AugOp::CropResize);
  CHECK(error_of([] { parse_aug_op("shear"); }) == Errc::InvalidSpec);
}

TEST_CASE("contrastive loss: single pair is zero") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto z = testing::random_unit_rows(rng, 2, 5);
    CHECK(tape_loss(z, 2, 5, 0.5) == 0.0);
  }
}

TEST_CASE("contrastive loss: identical rows give ln(2N - 1) for any temperature") {
  for (double tau : {0.1, 0.5, 1.0, 3.0}) {
    std::vector<double> z;
    for (int r = 0; r < 4; ++r) z.insert(z.end(), {0.6, 0.8});
    CHECK(tape_loss(z, 4, 2, tau) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("contrastive loss: worked two-pair example") {
  const std::vector<double> z{1, 0, 1, 0, 0, 1, 0, 1};
  const double expected = -std::log(std::exp(1.0) / (std::exp(1.0) + 2.0));
  CHECK(tape_loss(z, 4, 2, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.5514).epsilon(1e-4));
}

TEST_CASE("contrastive loss matches the brute-force definition") {
  Rng rng(2);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t d = 3 + rng.below(6);
      const double tau = rng.uniform(0.1, 2.0);
      const auto z = testing::random_unit_rows(rng, 2 * n, d);
      CHECK(tape_loss(z, 2 * n, d, tau) == doctest::Approx(testing::brute_force_nt_xent(z, 2 * n, d, tau)).epsilon(1e-9));
    }
  }
}

TEST_CASE("contrastive loss symmetries and bounds") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(4), d = 4;
    const auto z = testing::random_unit_rows(rng, 2 * n, d);
    const double base = tape_loss(z, 2 * n, d, 0.5);
    CHECK(base >= 0.0);

    auto swapped = z;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap_ranges(swapped.begin() + static_cast<long>(2 * k * d), swapped.begin() + static_cast<long>((2 * k + 1) * d),
                       swapped.begin() + static_cast<long>((2 * k + 1) * d));
    }
    CHECK(tape_loss(swapped, 2 * n, d, 0.5) == doctest::Approx(base).epsilon(1e-12));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<double> permuted;
    for (std::size_t k : order) {
      permuted.insert(permuted.end(), z.begin() + static_cast<long>(2 * k * d), z.begin() + static_cast<long>((2 * k + 2) * d));
    }
    CHECK(tape_loss(permuted, 2 * n, d, 0.5) == doctest::Approx(base).epsilon(1e-12));
  }
  // positives aligned, negatives opposed, small temperature: loss approaches 0
  const std::vector<double> ideal{1, 0, 1, 0, -1, 0, -1, 0};
  CHECK(tape_loss(ideal, 4, 2, 0.05) < 1e-10);
}

TEST_CASE("contrastive loss grows as temperature falls when a negative beats a positive") {
  Rng rng(4);
  int tested = 0;
  while (tested < 10) {
    const auto z = testing::random_unit_rows(rng, 6, 4);
    bool hard_negative = false;
    for (std::size_t i = 0; i < 6; ++i) {
      const std::size_t j = i ^ 1;
      auto dot = [&](std::size_t a, std::size_t b) {
        double s = 0;
        for (std::size_t c = 0; c < 4; ++c) s += z[a * 4 + c] * z[b * 4 + c];
        return s;
      };
      for (std::size_t k = 0; k < 6; ++k) {
        if (k != i && k != j && dot(i, k) > dot(i, j)) hard_negative = true;
      }
    }
    if (!hard_negative) continue;
    CHECK(tape_loss(z, 6, 4, 0.1) > tape_loss(z, 6, 4, 1.0));
    ++tested;
  }
}

TEST_CASE("contrastive loss errors") {
  Tape<double> tape(false);
  CHECK(error_of([&] { nt_xent_loss(tape, T64(Shape{2, 2}, {1, 0, 0.5, 0}), 0.5); }) == Errc::NonUnitRows);
  CHECK(error_of([&] { nt_xent_loss(tape, T64(Shape{2, 2}, {1, 0, 0, 1}), 0.0); }) == Errc::NonPositiveTemperature);
  CHECK(error_of([&] { nt_xent_loss(tape, T64(Shape{3, 2}, {1, 0, 0, 1, 1, 0}), 0.5); }) == Errc::ShapeMismatch);
}

TEST_CASE("contrastive loss gradient through normalization") {
  Rng rng(5);
  for (auto [n, d] : std::vector<std::array<std::size_t, 2>>{{1, 3}, {2, 4}, {3, 5}, {4, 2}}) {
    for (double tau : {0.2, 0.5, 1.0}) {
      std::vector<T64> in{T64(Shape{2 * n, d})};
      for (auto& v : in[0].data()) v = rng.uniform(-1, 1);
      const double err = ad::max_grad_error<double>(
          [&](Tape<double>& t) { return nt_xent_loss(t, ad::l2_normalize(t, in[0]), tau); }, std::span<T64>(in));
      CHECK(err < 1e-4);
    }
  }
}

TEST_CASE("encoder, projection and contrastive loss compose with correct gradients") {
  model::EncoderConfig cfg;
  cfg.stem_kernel = 2;
  cfg.stem_stride = 2;
  cfg.stage_channels = {2, 4};
  cfg.se_ratio = 2;
  cfg.embedding_dim = 4;
  cfg.projection_hidden = 6;
  cfg.projection_dim = 3;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto params = model::init_params<double>(cfg, seed);
    Rng rng(seed + 10);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params.names()[i].ends_with(".bias")) {
        for (auto& v : params.tensors()[i].data()) v = rng.uniform(0.05, 0.3);
      }
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params.names()[i].starts_with(model::kProjectionPrefix) && params.names()[i].ends_with(".weight")) {
        for (auto& v : params.tensors()[i].data()) v *= 3.0;
      }
    }
    T64 x(Shape{4, 3, 8, 8});
    for (auto& v : x.data()) v = rng.uniform(-2, 2);
    auto inputs = params.with_prefix(model::kEncoderPrefix);
    const auto proj = params.with_prefix(model::kProjectionPrefix);
    inputs.insert(inputs.end(), proj.begin(), proj.end());
    const double err = ad::max_grad_error<double>(
        [&](Tape<double>& t) { return nt_xent_loss(t, model::project(t, model::encoder_forward(t, x, cfg, params), params), 0.5); },
        std::span<T64>(inputs));
    CHECK(err < 1e-4);
  }
}

TEST_CASE("pretraining is deterministic and independent of the worker count") {
  const auto images = synthetic_images(32, 1);
  REQUIRE(images.size() == 64);
  const auto cfg = small_pretrain(2);
  setenv("SSLSE_THREADS", "1", 1);
  const auto a = pretrain(images, cfg);
  setenv("SSLSE_THREADS", "4", 1);
  const auto b = pretrain(images, cfg);
  unsetenv("SSLSE_THREADS");
  REQUIRE(a.history.size() == 2);
  CHECK(losses(a) == losses(b));
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    const auto& ta = a.params.tensors()[i];
    CHECK(std::equal(ta.data().begin(), ta.data().end(), b.params.tensors()[i].data().begin()));
  }
  CHECK(a.epoch == 2);
  CHECK(a.adam.step == 2 * (64 / 16));
}

TEST_CASE("pretraining continues exactly where it stopped") {
  const auto images = synthetic_images(16, 2);
  const auto full = pretrain(images, small_pretrain(3));
  auto partial = pretrain(images, small_pretrain(1));
  continue_pretrain(partial, images, small_pretrain(3));
  CHECK(losses(partial) == losses(full));
}

TEST_CASE("pretraining loss falls on separable data") {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto images = synthetic_images(128, seed);
    auto cfg = small_pretrain(6);
    cfg.batch_size = 32;
    cfg.seed = seed;
    const auto l = losses(pretrain(images, cfg));
    int decreases = 0;
    for (std::size_t i = 1; i < l.size(); ++i) decreases += l[i] < l[i - 1];
    CHECK(l[4] < l[0]);
    CHECK(decreases >= 4);
  }
}

TEST_CASE("pretraining guards") {
  auto cfg = small_pretrain(1);
  CHECK(error_of([&] { pretrain({}, cfg); }) == Errc::EmptyDataset);
  const auto images = synthetic_images(2, 4);
  std::vector<std::string> warnings;
  PretrainHooks hooks;
  hooks.on_warning = [&](std::string_view w) { warnings.emplace_back(w); };
  const auto state = pretrain(images, cfg, hooks);
  CHECK(state.history.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("exceeds dataset size") != std::string::npos);

  const std::vector<imaging::EegImage> one(images.begin(), images.begin() + 1);
  warnings.clear();
  const auto single = pretrain(one, cfg, hooks);
  CHECK(single.history[0].mean_loss == 0.0);
  CHECK(warnings.size() == 2);

  cfg.epochs = 0;
  CHECK(error_of([&] { cfg.validate(); }) == Errc::InvalidSpec);
  cfg = small_pretrain(1);
  cfg.loss.temperature = -1.0;
  CHECK(error_of([&] { cfg.validate(); }) == Errc::NonPositiveTemperature);
}

TEST_CASE("trailing incomplete batch is dropped") {
  const auto images = synthetic_images(10, 5);
  auto cfg = small_pretrain(1);
  cfg.batch_size = 8;
  const auto state = pretrain(images, cfg);
  CHECK(state.adam.step == 2);
}

TEST_CASE("epoch hooks and JSON lines") {
  const auto images = synthetic_images(8, 6);
  std::vector<std::size_t> seen;
  PretrainHooks hooks;
  hooks.on_epoch = [&](const PretrainState& s, const EpochRecord& r) {
    CHECK(s.epoch == r.epoch);
    seen.push_back(r.epoch);
  };
  const auto state = pretrain(images, small_pretrain(2), hooks);
  CHECK(seen == std::vector<std::size_t>{1, 2});
  const auto j = nlohmann::json::parse(epoch_json(state.history[0]));
  CHECK(j.size() == 3);
  CHECK(j.at("epoch") == 1);
  CHECK(j.at("mean_loss").get<double>() == state.history[0].mean_loss);
  CHECK(j.contains("wall_ms"));
}

TEST_CASE("stack_images checks sizes") {
  std::vector<FloatImage> views{FloatImage{3, 2, 2, std::vector<float>(12)}, FloatImage{3, 2, 3, std::vector<float>(18)}};
  CHECK(error_of([&] { stack_images(views); }) == Errc::ShapeMismatch);
  CHECK(error_of([] { stack_images({}); }) == Errc::EmptyDataset);
}
