#include "sslse/imaging/encode.hpp"

#include <algorithm>
#include <cmath>

#include "sslse/error.hpp"
#include "sslse/parallel.hpp"

namespace sslse::imaging {

std::vector<double> SegmentMatrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

ResizeMode parse_resize_mode(const std::string& text) {
  if (text == "nearest") return ResizeMode::Nearest;
  if (text == "bilinear") return ResizeMode::Bilinear;
  throw Error(Errc::InvalidSpec, "unknown resize mode '" + text + "' (expected nearest or bilinear)");
}

SegmentMatrix segment_window(std::span<const std::vector<double>> block, const ingest::WindowSpec& spec,
                             double rate_hz) {
  if (block.empty()) throw Error(Errc::InvalidSpec, "segment_window: block has no channels");
  const std::size_t s = spec.segment_samples(rate_hz);
  const std::size_t m = spec.window_samples(rate_hz);
  const std::size_t cols = spec.segments_per_window();
  if (cols * s != m) {
    throw Error(Errc::NonIntegralSegment, "window of " + std::to_string(m) + " samples is not " +
                                              std::to_string(cols) + " segments of " + std::to_string(s));
  }
  for (const auto& ch : block) {
    if (ch.size() != m) {
      throw Error(Errc::InvalidSpec, "segment_window: channel has " + std::to_string(ch.size()) +
                                         " samples, window needs " + std::to_string(m));
    }
  }
  SegmentMatrix out;
  out.rows = block.size() * s;
  out.cols = cols;
  out.values.resize(out.rows * out.cols);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t c = 0; c < block.size(); ++c) {
      for (std::size_t i = 0; i < s; ++i) out.at(c * s + i, j) = block[c][j * s + i];
    }
  }
  return out;
}

std::vector<double> normalize_segment(std::span<const double> column) {
  if (column.empty()) throw Error(Errc::InvalidSpec, "normalize_segment: empty column");
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  const double min = *lo, range = *hi - *lo;
  std::vector<double> out(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) out[i] = range > 0.0 ? (column[i] - min) / range : 0.5;
  return out;
}

SegmentMatrix normalize_columns(const SegmentMatrix& m) {
  SegmentMatrix out = m;
  for (std::size_t c = 0; c < m.cols; ++c) {
    const auto col = normalize_segment(m.column(c));
    for (std::size_t r = 0; r < m.rows; ++r) out.at(r, c) = col[r];
  }
  return out;
}

std::uint8_t lut_index(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::ValueOutOfRange, "colormap input " + std::to_string(v) + " outside [0, 1]");
  return static_cast<std::uint8_t>(std::min(255.0, std::floor(v * 255.0 + 0.5)));
}

RgbImage apply_colormap(const SegmentMatrix& normalized, const ColorLut& lut) {
  RgbImage img;
  img.height = normalized.rows;
  img.width = normalized.cols;
  img.pixels.resize(img.height * img.width * 3);
  for (std::size_t i = 0; i < normalized.values.size(); ++i) {
    const Rgb c = lut.entries[lut_index(normalized.values[i])];
    img.pixels[3 * i] = c.r;
    img.pixels[3 * i + 1] = c.g;
    img.pixels[3 * i + 2] = c.b;
  }
  return img;
}

RgbImage resize_nearest(const RgbImage& img, std::size_t out_h, std::size_t out_w) {
  if (img.height == 0 || img.width == 0 || out_h == 0 || out_w == 0) {
    throw Error(Errc::ZeroDimension, "resize_nearest: zero-sized image or target");
  }
  RgbImage out;
  out.height = out_h;
  out.width = out_w;
  out.pixels.resize(out_h * out_w * 3);
  for (std::size_t y = 0; y < out_h; ++y) {
    const std::size_t sy = y * img.height / out_h;
    for (std::size_t x = 0; x < out_w; ++x) {
      const std::size_t sx = x * img.width / out_w;
      const std::uint8_t* src = img.pixels.data() + (sy * img.width + sx) * 3;
      std::uint8_t* dst = out.pixels.data() + (y * out_w + x) * 3;
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  }
  return out;
}

RgbImage resize_bilinear(const RgbImage& img, std::size_t out_h, std::size_t out_w) {
  if (img.height == 0 || img.width == 0 || out_h == 0 || out_w == 0) {
    throw Error(Errc::ZeroDimension, "resize_bilinear: zero-sized image or target");
  }
  RgbImage out;
  out.height = out_h;
  out.width = out_w;
  out.pixels.resize(out_h * out_w * 3);
  const double sy_scale = static_cast<double>(img.height) / static_cast<double>(out_h);
  const double sx_scale = static_cast<double>(img.width) / static_cast<double>(out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy_scale - 0.5, 0.0, double(img.height - 1));
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx_scale - 0.5, 0.0, double(img.width - 1));
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t ch = 0; ch < 3; ++ch) {
        auto px = [&](std::size_t yy, std::size_t xx) { return double(img.pixels[(yy * img.width + xx) * 3 + ch]); };
        const double top = px(y0, x0) * (1 - wx) + px(y0, x1) * wx;
        const double bottom = px(y1, x0) * (1 - wx) + px(y1, x1) * wx;
        out.pixels[(y * out_w + x) * 3 + ch] = static_cast<std::uint8_t>(std::floor(top * (1 - wy) + bottom * wy + 0.5));
      }
    }
  }
  return out;
}

RgbImage resize(const RgbImage& img, std::size_t out_h, std::size_t out_w, ResizeMode mode) {
  return mode == ResizeMode::Nearest ? resize_nearest(img, out_h, out_w) : resize_bilinear(img, out_h, out_w);
}

EegImage encode_window(std::span<const std::vector<double>> block, const ingest::WindowSpec& spec, double rate_hz,
                       const ColorLut& lut, const EncodeOptions& options) {
  const auto normalized = normalize_columns(segment_window(block, spec, rate_hz));
  EegImage out;
  out.image = resize(apply_colormap(normalized, lut), options.out_height, options.out_width, options.resize_mode);
  return out;
}

std::vector<EegImage> encode_recording(const ingest::EegRecording& rec, const ingest::WindowSpec& spec,
                                       const ColorLut& lut, const EncodeOptions& options) {
  const auto windows = ingest::iter_windows(rec, spec);
  std::vector<EegImage> images(windows.size());
  parallel_for(windows.size(), [&](std::size_t i) {
    images[i] = encode_window(windows[i].block, spec, rec.sample_rate_hz, lut, options);
    images[i].label = windows[i].label;
    images[i].source_id = rec.source_id;
    images[i].window_index = static_cast<std::uint32_t>(windows[i].index);
  });
  return images;
}

}  // namespace sslse::imaging
