#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sslse/imaging/encode.hpp"
#include "sslse/rng.hpp"

namespace sslse::ssl {

/// Planar float image (channels x height x width), values in [0, 1].
struct FloatImage {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;

  float& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  float at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
  friend bool operator==(const FloatImage&, const FloatImage&) = default;
};

/// Interleaved 8-bit RGB -> planar floats scaled by 1/255.
FloatImage to_float(const imaging::RgbImage& img);

enum class AugOp {
  Rotate90,       // k uniform in {0, 1, 2, 3}
  SmallRotate,    // angle in degrees uniform in [lo, hi], nearest-neighbor
  GaussianBlur,   // sigma in pixels uniform in [lo, hi]
  GaussianNoise,  // sigma uniform in [lo, hi], result clamped to [0, 1]
  CropResize,     // area fraction uniform in [lo, hi], square crop resized back
  Cutout,         // side fraction of min(H, W) uniform in [lo, hi], filled with 0
};

std::string aug_op_name(AugOp op);
AugOp parse_aug_op(const std::string& name);

struct AugStep {
  AugOp op = AugOp::GaussianNoise;
  double probability = 1.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Ordered augmentation chain; each step fires independently with its
/// probability.
struct AugmentationSpec {
  std::vector<AugStep> steps;

  /// crop_resize (area 0.5-1.0) followed by gaussian_noise (sigma 0-0.1).
  static AugmentationSpec default_chain();

  /// Probabilities in [0, 1], ranges ordered, at least one step enabled.
  void validate() const;
};

FloatImage rotate90(const FloatImage& img, int quarter_turns);
FloatImage rotate_small(const FloatImage& img, double degrees);
FloatImage gaussian_blur(const FloatImage& img, double sigma);
FloatImage add_gaussian_noise(const FloatImage& img, double sigma, Rng& rng);
FloatImage crop_resize(const FloatImage& img, double area_fraction, Rng& rng);
FloatImage cutout(const FloatImage& img, double side_fraction, Rng& rng);

/// One draw of the chain.
FloatImage augment_view(const FloatImage& img, const AugmentationSpec& spec, Rng& rng);

/// Two successive draws of the chain from the same stream.
std::pair<FloatImage, FloatImage> augment_pair(const imaging::EegImage& img, const AugmentationSpec& spec, Rng& rng);

}  // namespace sslse::ssl
