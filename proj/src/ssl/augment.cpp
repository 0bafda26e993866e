#include "sslse/ssl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sslse/error.hpp"

namespace sslse::ssl {

FloatImage to_float(const imaging::RgbImage& img) {
  FloatImage out{3, img.height, img.width, std::vector<float>(3 * img.height * img.width)};
  const std::size_t hw = img.height * img.width;
  for (std::size_t i = 0; i < hw; ++i) {
    for (std::size_t c = 0; c < 3; ++c) out.data[c * hw + i] = static_cast<float>(img.pixels[3 * i + c]) / 255.0f;
  }
  return out;
}

std::string aug_op_name(AugOp op) {
  switch (op) {
    case AugOp::Rotate90: return "rotate90";
    case AugOp::SmallRotate: return "small_rotate";
    case AugOp::GaussianBlur: return "gaussian_blur";
    case AugOp::GaussianNoise: return "gaussian_noise";
    case AugOp::CropResize: return "crop_resize";
    case AugOp::Cutout: return "cutout";
  }
  return "unknown";
}

AugOp parse_aug_op(const std::string& name) {
  for (AugOp op : {AugOp::Rotate90, AugOp::SmallRotate, AugOp::GaussianBlur, AugOp::GaussianNoise,
                   AugOp::CropResize, AugOp::Cutout}) {
    if (aug_op_name(op) == name) return op;
  }
  throw Error(Errc::InvalidSpec, "unknown augmentation '" + name + "'");
}

AugmentationSpec AugmentationSpec::default_chain() {
  return AugmentationSpec{{AugStep{AugOp::CropResize, 1.0, 0.5, 1.0}, AugStep{AugOp::GaussianNoise, 1.0, 0.0, 0.1}}};
}

void AugmentationSpec::validate() const {
  bool any_enabled = false;
  for (const auto& s : steps) {
    if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
      throw Error(Errc::InvalidSpec, aug_op_name(s.op) + ": probability must lie in [0, 1]");
    }
    if (!(s.lo <= s.hi)) throw Error(Errc::InvalidSpec, aug_op_name(s.op) + ": range lower bound exceeds upper");
    if ((s.op == AugOp::CropResize || s.op == AugOp::Cutout) && !(s.lo > 0.0 && s.hi <= 1.0)) {
      throw Error(Errc::InvalidSpec, aug_op_name(s.op) + ": range must lie in (0, 1]");
    }
    if ((s.op == AugOp::GaussianBlur || s.op == AugOp::GaussianNoise) && s.lo < 0.0) {
      throw Error(Errc::InvalidSpec, aug_op_name(s.op) + ": sigma must be >= 0");
    }
    any_enabled = any_enabled || s.probability > 0.0;
  }
  if (!any_enabled) throw Error(Errc::InvalidSpec, "augmentation chain has no enabled step");
}

FloatImage rotate90(const FloatImage& img, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return img;
  const bool swap = k % 2 == 1;
  FloatImage out{img.channels, swap ? img.width : img.height, swap ? img.height : img.width,
                 std::vector<float>(img.data.size())};
  for (std::size_t c = 0; c < img.channels; ++c) {
    for (std::size_t y = 0; y < out.height; ++y) {
      for (std::size_t x = 0; x < out.width; ++x) {
        // Counter-clockwise rotation by k quarter turns.
        std::size_t sy = 0, sx = 0;
        if (k == 1) {
          sy = x;
          sx = img.width - 1 - y;
        } else if (k == 2) {
          sy = img.height - 1 - y;
          sx = img.width - 1 - x;
        } else {
          sy = img.height - 1 - x;
          sx = y;
        }
        out.at(c, y, x) = img.at(c, sy, sx);
      }
    }
  }
  return out;
}

FloatImage rotate_small(const FloatImage& img, double degrees) {
  FloatImage out = img;
  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const double cy = (static_cast<double>(img.height) - 1.0) / 2.0;
  const double cx = (static_cast<double>(img.width) - 1.0) / 2.0;
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
      const double sy = cy + cs * dy - sn * dx;
      const double sx = cx + sn * dy + cs * dx;
      const auto iy = static_cast<std::size_t>(std::clamp(std::lround(sy), 0L, static_cast<long>(img.height) - 1));
      const auto ix = static_cast<std::size_t>(std::clamp(std::lround(sx), 0L, static_cast<long>(img.width) - 1));
      for (std::size_t c = 0; c < img.channels; ++c) out.at(c, y, x) = img.at(c, iy, ix);
    }
  }
  return out;
}

FloatImage gaussian_blur(const FloatImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<float> kernel(static_cast<std::size_t>(2 * radius + 1));
  float total = 0.0f;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const float w = static_cast<float>(std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma)));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    total += w;
  }
  for (auto& w : kernel) w /= total;

  auto clamp_index = [](std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };
  FloatImage tmp = img, out = img;
  for (std::size_t c = 0; c < img.channels; ++c) {
    for (std::size_t y = 0; y < img.height; ++y) {
      for (std::size_t x = 0; x < img.width; ++x) {
        float acc = 0.0f;
        for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
          acc += kernel[static_cast<std::size_t>(i + radius)] *
                 img.at(c, y, clamp_index(static_cast<std::ptrdiff_t>(x) + i, img.width));
        }
        tmp.at(c, y, x) = acc;
      }
    }
    for (std::size_t y = 0; y < img.height; ++y) {
      for (std::size_t x = 0; x < img.width; ++x) {
        float acc = 0.0f;
        for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
          acc += kernel[static_cast<std::size_t>(i + radius)] *
                 tmp.at(c, clamp_index(static_cast<std::ptrdiff_t>(y) + i, img.height), x);
        }
        out.at(c, y, x) = acc;
      }
    }
  }
  return out;
}

FloatImage add_gaussian_noise(const FloatImage& img, double sigma, Rng& rng) {
  FloatImage out = img;
  if (sigma <= 0.0) return out;
  for (auto& v : out.data) v = std::clamp(v + static_cast<float>(sigma * rng.normal()), 0.0f, 1.0f);
  return out;
}

FloatImage crop_resize(const FloatImage& img, double area_fraction, Rng& rng) {
  const double side = std::sqrt(std::clamp(area_fraction, 0.0, 1.0));
  const std::size_t ch = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(side * double(img.height))));
  const std::size_t cw = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(side * double(img.width))));
  const std::size_t y0 = static_cast<std::size_t>(rng.below(img.height - ch + 1));
  const std::size_t x0 = static_cast<std::size_t>(rng.below(img.width - cw + 1));
  FloatImage out{img.channels, img.height, img.width, std::vector<float>(img.data.size())};
  for (std::size_t c = 0; c < img.channels; ++c) {
    for (std::size_t y = 0; y < img.height; ++y) {
      const std::size_t sy = y0 + y * ch / img.height;
      for (std::size_t x = 0; x < img.width; ++x) out.at(c, y, x) = img.at(c, sy, x0 + x * cw / img.width);
    }
  }
  return out;
}

FloatImage cutout(const FloatImage& img, double side_fraction, Rng& rng) {
  FloatImage out = img;
  const std::size_t side = std::min(
      {img.height, img.width,
       static_cast<std::size_t>(std::lround(side_fraction * double(std::min(img.height, img.width))))});
  if (side == 0) return out;
  const std::size_t y0 = static_cast<std::size_t>(rng.below(img.height - side + 1));
  const std::size_t x0 = static_cast<std::size_t>(rng.below(img.width - side + 1));
  for (std::size_t c = 0; c < img.channels; ++c)
    for (std::size_t y = y0; y < y0 + side; ++y)
      for (std::size_t x = x0; x < x0 + side; ++x) out.at(c, y, x) = 0.0f;
  return out;
}

FloatImage augment_view(const FloatImage& img, const AugmentationSpec& spec, Rng& rng) {
  FloatImage view = img;
  for (const auto& step : spec.steps) {
    if (!rng.bernoulli(step.probability)) continue;
    switch (step.op) {
      case AugOp::Rotate90:
        view = rotate90(view, static_cast<int>(rng.below(4)));
        break;
      case AugOp::SmallRotate:
        view = rotate_small(view, rng.uniform(step.lo, step.hi));
        break;
      case AugOp::GaussianBlur:
        view = gaussian_blur(view, rng.uniform(step.lo, step.hi));
        break;
      case AugOp::GaussianNoise:
        view = add_gaussian_noise(view, rng.uniform(step.lo, step.hi), rng);
        break;
      case AugOp::CropResize:
        view = crop_resize(view, rng.uniform(step.lo, step.hi), rng);
        break;
      case AugOp::Cutout:
        view = cutout(view, rng.uniform(step.lo, step.hi), rng);
        break;
    }
  }
  return view;
}

std::pair<FloatImage, FloatImage> augment_pair(const imaging::EegImage& img, const AugmentationSpec& spec, Rng& rng) {
  const FloatImage source = to_float(img.image);
  FloatImage a = augment_view(source, spec, rng);
  FloatImage b = augment_view(source, spec, rng);
  return {std::move(a), std::move(b)};
}

}  // namespace sslse::ssl
