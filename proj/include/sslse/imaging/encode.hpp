#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sslse/imaging/lut.hpp"
#include "sslse/ingest/recording.hpp"

namespace sslse::imaging {

/// Row-major real matrix; column j is the j-th temporal segment of a window.
struct SegmentMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::vector<double> column(std::size_t c) const;
};

/// Interleaved 8-bit RGB raster.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  // height * width * 3

  Rgb pixel(std::size_t y, std::size_t x) const {
    const std::size_t i = (y * width + x) * 3;
    return Rgb{pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// The training unit: an RGB image plus where it came from.
struct EegImage {
  RgbImage image;
  std::optional<int> label;
  std::string source_id;
  std::uint32_t window_index = 0;

  std::size_t height() const noexcept { return image.height; }
  std::size_t width() const noexcept { return image.width; }
  friend bool operator==(const EegImage&, const EegImage&) = default;
};

enum class ResizeMode { Nearest, Bilinear };

ResizeMode parse_resize_mode(const std::string& text);

/// Splits a channels x m block into segments of segment_ms; column j holds
/// segment j flattened channel-major (channel 0's samples, then channel 1's...).
/// Errors: NonIntegralSegment, InvalidSpec (block length != window length).
SegmentMatrix segment_window(std::span<const std::vector<double>> block, const ingest::WindowSpec& spec,
                             double rate_hz);

/// (v - min) / (max - min); a constant column maps to 0.5 everywhere.
std::vector<double> normalize_segment(std::span<const double> column);

/// normalize_segment applied to every column.
SegmentMatrix normalize_columns(const SegmentMatrix& m);

/// Round-half-up of v * 255 into the LUT. Values outside [0, 1] raise
/// ValueOutOfRange.
std::uint8_t lut_index(double v);
RgbImage apply_colormap(const SegmentMatrix& normalized, const ColorLut& lut);

/// output(y, x) = input(floor(y * h / out_h), floor(x * w / out_w)).
RgbImage resize_nearest(const RgbImage& img, std::size_t out_h, std::size_t out_w);

/// Pixel-center aligned bilinear scaling; introduces colors outside the LUT.
RgbImage resize_bilinear(const RgbImage& img, std::size_t out_h, std::size_t out_w);

RgbImage resize(const RgbImage& img, std::size_t out_h, std::size_t out_w, ResizeMode mode);

struct EncodeOptions {
  std::size_t out_height = 224;
  std::size_t out_width = 224;
  ResizeMode resize_mode = ResizeMode::Nearest;
};

/// segment_window -> normalize_columns -> apply_colormap -> resize.
EegImage encode_window(std::span<const std::vector<double>> block, const ingest::WindowSpec& spec, double rate_hz,
                       const ColorLut& lut, const EncodeOptions& options = {});

/// Encodes every window of a recording, attaching labels and provenance.
std::vector<EegImage> encode_recording(const ingest::EegRecording& rec, const ingest::WindowSpec& spec,
                                       const ColorLut& lut, const EncodeOptions& options = {});

}  // namespace sslse::imaging
