#pragma once

#include <cstddef>
#include <cstdint>

#include "sslse/ingest/recording.hpp"

namespace sslse::ingest {

/// Labeled synthetic corpus: consecutive windows of window_s seconds, each a
/// sinusoid at f0_hz + k * delta_f_hz for its class k (per-channel phase
/// offset c * pi / 4, phase reset at every window) plus white Gaussian noise.
/// Classes are balanced and their order is shuffled by the seed.
struct SynthSpec {
  std::size_t classes = 2;
  std::size_t windows_per_class = 10;
  double sample_rate_hz = 500.0;
  std::size_t channels = 1;
  double noise_sigma = 10.0;
  std::uint64_t seed = 0;
  double window_s = 5.0;
  double f0_hz = 8.0;
  double delta_f_hz = 6.0;
  double amplitude_uv = 50.0;

  void validate() const;
  double class_frequency(std::size_t k) const noexcept { return f0_hz + static_cast<double>(k) * delta_f_hz; }
};

/// Pure function of the spec: equal specs give identical recordings.
EegRecording synthesize_recording(const SynthSpec& spec);

}  // namespace sslse::ingest
