#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sslse::ingest {

/// Multichannel recording in physical units (microvolts).
struct EegRecording {
  double sample_rate_hz = 0.0;
  std::vector<std::vector<double>> samples;  // [channel][sample]
  std::vector<std::string> channel_labels;
  /// Class id per labeled span; span i covers samples
  /// [i * label_window_s * rate, (i + 1) * label_window_s * rate).
  std::map<std::size_t, int> window_labels;
  double label_window_s = 0.0;
  std::size_t num_classes = 0;
  std::string source_id;

  std::size_t channel_count() const noexcept { return samples.size(); }
  std::size_t sample_count() const noexcept { return samples.empty() ? 0 : samples.front().size(); }
  double duration_s() const noexcept { return static_cast<double>(sample_count()) / sample_rate_hz; }

  /// Throws InvalidSpec on ragged channels, non-positive rate or a label id
  /// outside [0, num_classes).
  void validate() const;
};

/// Window geometry. stride_s defaults to window_s (non-overlapping).
struct WindowSpec {
  double window_s = 5.0;
  double segment_ms = 50.0;
  std::optional<double> stride_s;

  double stride() const noexcept { return stride_s.value_or(window_s); }

  /// Samples per window at `rate`. Throws InvalidSpec when not integral.
  std::size_t window_samples(double rate_hz) const;
  /// Samples per segment at `rate`. Throws NonIntegralSegment when not a positive integer.
  std::size_t segment_samples(double rate_hz) const;
  std::size_t stride_samples(double rate_hz) const;
  /// Segments per window (window_s * 1000 / segment_ms).
  std::size_t segments_per_window() const;

  void validate(double rate_hz) const;
};

struct Window {
  std::size_t index = 0;
  std::size_t start_sample = 0;
  std::vector<std::vector<double>> block;  // [channel][m]
  std::optional<int> label;
};

/// Windows in time order; a trailing partial window is dropped.
std::vector<Window> iter_windows(const EegRecording& rec, const WindowSpec& spec);

/// Number of windows iter_windows would emit.
std::size_t window_count(const EegRecording& rec, const WindowSpec& spec);

}  // namespace sslse::ingest
