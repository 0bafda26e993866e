#include "sslse/ingest/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sslse/error.hpp"
#include "sslse/rng.hpp"

namespace sslse::ingest {

void SynthSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidSpec, "synth spec: " + msg); };
  if (classes < 2) fail("classes must be >= 2");
  if (windows_per_class < 1) fail("windows_per_class must be >= 1");
  if (channels < 1) fail("channels must be >= 1");
  if (!(sample_rate_hz > 0.0)) fail("sample_rate_hz must be > 0");
  if (!(window_s > 0.0)) fail("window_s must be > 0");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  const double m = window_s * sample_rate_hz;
  if (std::abs(m - std::round(m)) > 1e-9 * m) fail("window_s * sample_rate_hz must be a whole number of samples");
  if (class_frequency(classes - 1) >= sample_rate_hz / 2.0) fail("highest class frequency exceeds Nyquist");
  if (!(f0_hz > 0.0) || !(delta_f_hz > 0.0)) fail("f0_hz and delta_f_hz must be > 0");
}

EegRecording synthesize_recording(const SynthSpec& spec) {
  spec.validate();
  const auto m = static_cast<std::size_t>(std::llround(spec.window_s * spec.sample_rate_hz));
  const std::size_t windows = spec.classes * spec.windows_per_class;

  std::vector<int> order;
  order.reserve(windows);
  for (std::size_t k = 0; k < spec.classes; ++k) order.insert(order.end(), spec.windows_per_class, static_cast<int>(k));
  Rng label_rng(derive_seed(spec.seed, 0));
  label_rng.shuffle(std::span<int>(order));
  Rng noise_rng(derive_seed(spec.seed, 1));

  EegRecording rec;
  rec.sample_rate_hz = spec.sample_rate_hz;
  rec.num_classes = spec.classes;
  rec.label_window_s = spec.window_s;
  rec.source_id = "synth-seed" + std::to_string(spec.seed);
  rec.samples.assign(spec.channels, std::vector<double>(windows * m));
  for (std::size_t c = 0; c < spec.channels; ++c) rec.channel_labels.push_back("SYN" + std::to_string(c));

  for (std::size_t w = 0; w < windows; ++w) {
    const int k = order[w];
    rec.window_labels[w] = k;
    const double omega = 2.0 * std::numbers::pi * spec.class_frequency(static_cast<std::size_t>(k));
    for (std::size_t c = 0; c < spec.channels; ++c) {
      const double phase = static_cast<double>(c) * std::numbers::pi / 4.0;
      double* out = rec.samples[c].data() + w * m;
      for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate_hz;
        out[i] = spec.amplitude_uv * std::sin(omega * t + phase);
      }
    }
    if (spec.noise_sigma > 0.0) {
      for (std::size_t c = 0; c < spec.channels; ++c) {
        double* out = rec.samples[c].data() + w * m;
        for (std::size_t i = 0; i < m; ++i) out[i] += spec.noise_sigma * noise_rng.normal();
      }
    }
  }
  return rec;
}

}  // namespace sslse::ingest
