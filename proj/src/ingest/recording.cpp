#include "sslse/ingest/recording.hpp"

#include <cmath>
#include <string>

#include "sslse/error.hpp"

namespace sslse::ingest {

namespace {

// x must be within 1e-9 (relative) of a positive integer.
std::optional<std::size_t> as_count(double x) {
  const double r = std::round(x);
  if (r < 1.0 || std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) return std::nullopt;
  return static_cast<std::size_t>(r);
}

}  // namespace

void EegRecording::validate() const {
  if (!(sample_rate_hz > 0.0)) throw Error(Errc::InvalidSpec, "sample rate must be > 0");
  if (samples.empty()) throw Error(Errc::InvalidSpec, "recording has no channels");
  for (const auto& ch : samples) {
    if (ch.size() != samples.front().size()) throw Error(Errc::InvalidSpec, "channels differ in length");
  }
  for (const auto& [index, label] : window_labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw Error(Errc::InvalidSpec, "window " + std::to_string(index) + " has class " + std::to_string(label) +
                                         " but only " + std::to_string(num_classes) + " classes are declared");
    }
  }
  if (!window_labels.empty() && !(label_window_s > 0.0)) {
    throw Error(Errc::InvalidSpec, "labeled recording needs label_window_s > 0");
  }
}

std::size_t WindowSpec::window_samples(double rate_hz) const {
  const auto m = as_count(window_s * rate_hz);
  if (!m) {
    throw Error(Errc::InvalidSpec, "window of " + std::to_string(window_s) + " s is not a whole number of samples at " +
                                       std::to_string(rate_hz) + " Hz");
  }
  return *m;
}

std::size_t WindowSpec::segment_samples(double rate_hz) const {
  const auto s = as_count(segment_ms / 1000.0 * rate_hz);
  if (!s) {
    throw Error(Errc::NonIntegralSegment, "segment of " + std::to_string(segment_ms) +
                                              " ms is not a positive whole number of samples at " +
                                              std::to_string(rate_hz) + " Hz");
  }
  return *s;
}

std::size_t WindowSpec::stride_samples(double rate_hz) const {
  const auto s = as_count(stride() * rate_hz);
  if (!s) throw Error(Errc::InvalidSpec, "stride is not a positive whole number of samples");
  return *s;
}

std::size_t WindowSpec::segments_per_window() const {
  const auto k = as_count(window_s * 1000.0 / segment_ms);
  if (!k) {
    throw Error(Errc::InvalidSpec, "window of " + std::to_string(window_s) + " s is not a multiple of " +
                                       std::to_string(segment_ms) + " ms segments");
  }
  return *k;
}

void WindowSpec::validate(double rate_hz) const {
  if (!(window_s > 0.0) || !(segment_ms > 0.0) || !(stride() > 0.0)) {
    throw Error(Errc::InvalidSpec, "window, segment and stride lengths must be > 0");
  }
  segments_per_window();
  window_samples(rate_hz);
  segment_samples(rate_hz);
  stride_samples(rate_hz);
}

std::size_t window_count(const EegRecording& rec, const WindowSpec& spec) {
  spec.validate(rec.sample_rate_hz);
  const std::size_t n = rec.sample_count();
  const std::size_t m = spec.window_samples(rec.sample_rate_hz);
  if (n < m) return 0;
  return (n - m) / spec.stride_samples(rec.sample_rate_hz) + 1;
}

std::vector<Window> iter_windows(const EegRecording& rec, const WindowSpec& spec) {
  rec.validate();
  spec.validate(rec.sample_rate_hz);
  const std::size_t n = rec.sample_count();
  const std::size_t m = spec.window_samples(rec.sample_rate_hz);
  if (n < m) {
    throw Error(Errc::WindowLongerThanRecording, std::to_string(spec.window_s) + " s window exceeds " +
                                                     std::to_string(rec.duration_s()) + " s recording");
  }
  const std::size_t stride = spec.stride_samples(rec.sample_rate_hz);
  std::size_t label_span = 0;
  if (!rec.window_labels.empty()) label_span = static_cast<std::size_t>(std::llround(rec.label_window_s * rec.sample_rate_hz));

  std::vector<Window> out;
  const std::size_t count = (n - m) / stride + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Window w;
    w.index = i;
    w.start_sample = i * stride;
    w.block.reserve(rec.channel_count());
    for (const auto& ch : rec.samples) {
      w.block.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(w.start_sample),
                           ch.begin() + static_cast<std::ptrdiff_t>(w.start_sample + m));
    }
    if (label_span > 0) {
      const std::size_t span = w.start_sample / label_span;
      if (w.start_sample + m <= (span + 1) * label_span) {
        if (auto it = rec.window_labels.find(span); it != rec.window_labels.end()) w.label = it->second;
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace sslse::ingest
