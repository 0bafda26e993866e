#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "sslse/error.hpp"
#include "sslse/ingest.hpp"
#include "support.hpp"

using namespace sslse;
using namespace sslse::ingest;
using testing::EdfSignalDef;
using testing::hand_edf;

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

}  // namespace

TEST_CASE("hand-built EDF decodes with the linear scale") {
  const auto bytes = hand_edf({EdfSignalDef{}}, 1, 1.0, {-100, 0, 100, -100});
  CHECK(bytes.size() == 512 + 8);
  const auto rec = parse_edf(bytes);
  REQUIRE(rec.channel_count() == 1);
  CHECK(rec.sample_rate_hz == 4.0);
  const std::vector<double> expected{-1.0, 0.0, 1.0, -1.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK(rec.samples[0][i] == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(rec.channel_labels.at(0) == "EEG");
}

TEST_CASE("EDF header fields and record interleaving") {
  EdfSignalDef a{"A", 0.0, 10.0, 0, 10, 2};
  EdfSignalDef b{"B", 0.0, 20.0, 0, 10, 2};
  // two records: [a0 a1 b0 b1] [a2 a3 b2 b3]
  const auto bytes = hand_edf({a, b}, 2, 0.5, {1, 2, 3, 4, 5, 6, 7, 8});
  const auto header = parse_edf_header(bytes);
  CHECK(header.header_bytes() == 768);
  CHECK(header.num_records == 2);
  CHECK(header.signals.size() == 2);
  const auto rec = parse_edf(bytes);
  CHECK(rec.sample_rate_hz == 4.0);
  CHECK(rec.samples[0] == std::vector<double>{1, 2, 5, 6});
  CHECK(rec.samples[1] == std::vector<double>{6, 8, 14, 16});
}

TEST_CASE("EDF error classes") {
  SUBCASE("truncated header") {
    std::vector<std::uint8_t> short_input(200, ' ');
    CHECK(error_of([&] { parse_edf(short_input); }) == Errc::TruncatedHeader);
    auto full = hand_edf({EdfSignalDef{}}, 1, 1.0, {0, 0, 0, 0});
    full.resize(300);
    CHECK(error_of([&] { parse_edf(full); }) == Errc::TruncatedHeader);
  }
  SUBCASE("bad magic") {
    CHECK(error_of([&] { parse_edf(hand_edf({EdfSignalDef{}}, 1, 1.0, {0, 0, 0, 0}, "1")); }) == Errc::BadMagic);
  }
  SUBCASE("inconsistent rates") {
    EdfSignalDef a, b;
    a.samples_per_record = 250;
    b.samples_per_record = 500;
    std::vector<std::int16_t> payload(750, 0);
    CHECK(error_of([&] { parse_edf(hand_edf({a, b}, 1, 1.0, payload)); }) == Errc::InconsistentRates);
  }
  SUBCASE("scale undefined") {
    EdfSignalDef s;
    s.dmin = s.dmax = 5;
    CHECK(error_of([&] { parse_edf(hand_edf({s}, 1, 1.0, {0, 0, 0, 0})); }) == Errc::ScaleUndefined);
  }
  SUBCASE("short payload") {
    CHECK(error_of([&] { parse_edf(hand_edf({EdfSignalDef{}}, 2, 1.0, {0, 0, 0, 0})); }) == Errc::TruncatedPayload);
  }
}

TEST_CASE("EDF round trip stays within one digital step") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SynthSpec spec;
    spec.channels = 3;
    spec.windows_per_class = 2;
    spec.seed = seed;
    const auto rec = synthesize_recording(spec);
    const auto back = parse_edf(write_edf(rec));
    CHECK(back.sample_rate_hz == rec.sample_rate_hz);
    REQUIRE(back.channel_count() == rec.channel_count());
    REQUIRE(back.sample_count() == rec.sample_count());
    for (std::size_t c = 0; c < rec.channel_count(); ++c) {
      const auto [lo, hi] = std::minmax_element(rec.samples[c].begin(), rec.samples[c].end());
      const double lsb = (*hi - *lo) / 65535.0;
      double worst = 0.0;
      for (std::size_t i = 0; i < rec.sample_count(); ++i) worst = std::max(worst, std::abs(back.samples[c][i] - rec.samples[c][i]));
      CHECK(worst <= lsb * 1.0001);
    }
  }
}

TEST_CASE("csv parsing") {
  auto rec = parse_csv("0.0,1.0\n2.0,3.0", 500.0);
  CHECK(rec.channel_count() == 2);
  CHECK(rec.sample_count() == 2);
  CHECK(rec.samples[1] == std::vector<double>{1.0, 3.0});
  CHECK(rec.sample_rate_hz == 500.0);

  rec = parse_csv("Fp1,Fp2\n1,2\n3,4\n", 250.0);
  CHECK(rec.channel_labels == std::vector<std::string>{"Fp1", "Fp2"});
  CHECK(rec.sample_count() == 2);

  CHECK(error_of([] { parse_csv("0.0,1.0\n2.0", 500.0); }) == Errc::RaggedRow);
  CHECK(error_of([] { parse_csv("0.0,1.0\n2.0,x", 500.0); }) == Errc::NonNumericCell);
  CHECK(error_of([] { parse_csv("", 500.0); }) == Errc::EmptyInput);
  CHECK(error_of([] { parse_csv("a,b\n", 500.0); }) == Errc::EmptyInput);
}

TEST_CASE("csv duration is rows over rate") {
  std::string text;
  for (int r = 0; r < 1500; ++r) text += std::to_string(r) + "," + std::to_string(-r) + ",0.5\n";
  const auto rec = parse_csv(text, 500.0);
  CHECK(rec.channel_count() == 3);
  CHECK(rec.duration_s() == doctest::Approx(3.0));
}

TEST_CASE("synthetic recordings are pure functions of the spec") {
  SynthSpec spec;
  spec.seed = 7;
  const auto a = synthesize_recording(spec);
  const auto b = synthesize_recording(spec);
  CHECK(a.samples == b.samples);
  CHECK(a.window_labels == b.window_labels);
  spec.seed = 8;
  CHECK(synthesize_recording(spec).samples != a.samples);
}

TEST_CASE("noise-free synthetic windows repeat exactly per class") {
  SynthSpec spec;
  spec.noise_sigma = 0.0;
  spec.windows_per_class = 4;
  const auto rec = synthesize_recording(spec);
  const WindowSpec ws{spec.window_s, 50.0, std::nullopt};
  const auto windows = iter_windows(rec, ws);
  REQUIRE(windows.size() == 8);
  std::vector<const Window*> first(2, nullptr);
  std::size_t per_class[2] = {0, 0};
  for (const auto& w : windows) {
    REQUIRE(w.label.has_value());
    const auto k = static_cast<std::size_t>(*w.label);
    per_class[k]++;
    if (!first[k]) first[k] = &w;
    else CHECK(w.block == first[k]->block);
  }
  CHECK(per_class[0] == 4);
  CHECK(per_class[1] == 4);
  CHECK(first[0]->block != first[1]->block);
}

TEST_CASE("spectral peak sits at the class frequency") {
  SynthSpec spec;
  spec.classes = 3;
  spec.windows_per_class = 2;
  spec.seed = 5;
  const auto rec = synthesize_recording(spec);
  const WindowSpec ws{spec.window_s, 50.0, std::nullopt};
  const double bin_hz = 1.0 / spec.window_s;
  for (const auto& w : iter_windows(rec, ws)) {
    const auto mag = testing::dft_magnitude(w.block[0]);
    const auto peak = std::max_element(mag.begin() + 1, mag.end()) - mag.begin();
    const double expected = spec.class_frequency(static_cast<std::size_t>(*w.label));
    CHECK(std::abs(static_cast<double>(peak) * bin_hz - expected) <= bin_hz);
  }
}

TEST_CASE("window iteration") {
  EegRecording rec;
  rec.sample_rate_hz = 500.0;
  rec.samples.assign(1, std::vector<double>(12 * 500, 0.0));
  WindowSpec spec;
  auto windows = iter_windows(rec, spec);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].index == 0);
  CHECK(windows[1].index == 1);
  CHECK(windows[0].block[0].size() == 2500);
  CHECK(windows[1].start_sample == 2500);

  rec.samples.assign(1, std::vector<double>(10 * 500, 0.0));
  spec.stride_s = 2.5;
  windows = iter_windows(rec, spec);
  REQUIRE(windows.size() == 3);
  CHECK(windows[0].start_sample == 0);
  CHECK(windows[1].start_sample == 1250);
  CHECK(windows[2].start_sample == 2500);

  rec.samples.assign(1, std::vector<double>(4 * 500, 0.0));
  CHECK(error_of([&] { iter_windows(rec, WindowSpec{}); }) == Errc::WindowLongerThanRecording);
}

TEST_CASE("window count formula holds across lengths and strides") {
  sslse::Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    EegRecording rec;
    rec.sample_rate_hz = 100.0;
    const std::size_t n = 100 + rng.below(2000);
    rec.samples.assign(1, std::vector<double>(n, 0.0));
    WindowSpec spec{1.0, 100.0, 0.1 * static_cast<double>(1 + rng.below(20))};
    const std::size_t m = 100, stride = spec.stride_samples(100.0);
    const auto windows = iter_windows(rec, spec);
    CHECK(windows.size() == (n - m) / stride + 1);
    CHECK(window_count(rec, spec) == windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) CHECK(windows[i].start_sample == i * stride);
  }
}

TEST_CASE("window labels require full containment in a label span") {
  EegRecording rec;
  rec.sample_rate_hz = 10.0;
  rec.samples.assign(1, std::vector<double>(60, 0.0));
  rec.num_classes = 2;
  rec.label_window_s = 2.0;
  rec.window_labels = {{0, 0}, {1, 1}, {2, 0}};
  const auto windows = iter_windows(rec, WindowSpec{1.0, 100.0, std::nullopt});
  REQUIRE(windows.size() == 6);
  CHECK(windows[0].label == 0);
  CHECK(windows[2].label == 1);
  CHECK(windows[5].label == 0);
  const auto straddle = iter_windows(rec, WindowSpec{2.0, 100.0, 1.0});
  CHECK(straddle[1].label == std::nullopt);
  CHECK(straddle[2].label == 1);
}

TEST_CASE("spec validation") {
  CHECK(error_of([] { WindowSpec{5.0, 3.0, std::nullopt}.segments_per_window(); }) == Errc::InvalidSpec);
  CHECK(error_of([] { WindowSpec{5.0, 50.0, std::nullopt}.segment_samples(10.0); }) == Errc::NonIntegralSegment);
  SynthSpec s;
  s.classes = 1;
  CHECK(error_of([&] { s.validate(); }) == Errc::InvalidSpec);
  EegRecording rec;
  rec.sample_rate_hz = 1.0;
  rec.samples = {{1.0, 2.0}, {1.0}};
  CHECK(error_of([&] { rec.validate(); }) == Errc::InvalidSpec);
}
