#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>

#include "doctest.h"
#include "sslse/error.hpp"
#include "sslse/imaging.hpp"
#include "sslse/ingest.hpp"
#include "support.hpp"

using namespace sslse;
using namespace sslse::imaging;

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

std::vector<std::vector<double>> random_block(Rng& rng, std::size_t channels, std::size_t m) {
  std::vector<std::vector<double>> block(channels);
  for (auto& ch : block) ch = testing::random_vector(rng, m, -50.0, 50.0);
  return block;
}

std::set<std::tuple<int, int, int>> palette(const ColorLut& lut) {
  std::set<std::tuple<int, int, int>> out;
  for (const auto& c : lut.entries) out.emplace(c.r, c.g, c.b);
  return out;
}

}  // namespace

TEST_CASE("segment matrix shapes") {
  Rng rng(1);
  const ingest::WindowSpec five{5.0, 50.0, std::nullopt};
  auto m = segment_window(random_block(rng, 1, 2500), five, 500.0);
  CHECK(m.rows == 25);
  CHECK(m.cols == 100);

  const ingest::WindowSpec two{2.0, 20.0, std::nullopt};
  m = segment_window(random_block(rng, 1, 1000), two, 500.0);
  CHECK(m.rows == 10);
  CHECK(m.cols == 100);
}

TEST_CASE("multi-channel segments are flattened channel-major") {
  std::vector<std::vector<double>> block(2, std::vector<double>(100));
  for (std::size_t i = 0; i < 100; ++i) {
    block[0][i] = static_cast<double>(i);
    block[1][i] = 1000.0 + static_cast<double>(i);
  }
  const auto m = segment_window(block, ingest::WindowSpec{1.0, 100.0, std::nullopt}, 100.0);
  REQUIRE(m.rows == 20);
  REQUIRE(m.cols == 10);
  for (std::size_t j = 0; j < 10; ++j) {
    for (std::size_t r = 0; r < 10; ++r) {
      CHECK(m.at(r, j) == static_cast<double>(10 * j + r));
      CHECK(m.at(10 + r, j) == 1000.0 + static_cast<double>(10 * j + r));
    }
  }
}

TEST_CASE("segment errors") {
  std::vector<std::vector<double>> block(1, std::vector<double>(50));
  CHECK(error_of([&] { segment_window(block, ingest::WindowSpec{1.0, 100.0, std::nullopt}, 55.0); }) ==
        Errc::NonIntegralSegment);
}

TEST_CASE("normalize_segment") {
  CHECK(normalize_segment(std::vector<double>{0, 5, 10}) == std::vector<double>{0, 0.5, 1});
  CHECK(normalize_segment(std::vector<double>{3, 3, 3}) == std::vector<double>{0.5, 0.5, 0.5});
  const auto v = normalize_segment(std::vector<double>{-2, 0, 6});
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(0.25));
  CHECK(v[2] == 1.0);
}

TEST_CASE("normalized columns stay in the unit interval") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = segment_window(random_block(rng, 2, 500), ingest::WindowSpec{1.0, 20.0, std::nullopt}, 500.0);
    const auto norm = normalize_columns(raw);
    for (std::size_t j = 0; j < norm.cols; ++j) {
      const auto col = norm.column(j);
      CHECK(*std::min_element(col.begin(), col.end()) == 0.0);
      CHECK(*std::max_element(col.begin(), col.end()) == 1.0);
    }
  }
}

TEST_CASE("lut index rounding") {
  CHECK(lut_index(0.0) == 0);
  CHECK(lut_index(1.0) == 255);
  CHECK(lut_index(0.5) == 128);
  CHECK(lut_index(127.4 / 255.0) == 127);
  CHECK(error_of([] { lut_index(1.0001); }) == Errc::ValueOutOfRange);
  CHECK(error_of([] { lut_index(-0.01); }) == Errc::ValueOutOfRange);
  CHECK(error_of([] { lut_index(std::nan("")); }) == Errc::ValueOutOfRange);

  std::vector<int> seen(256, 0);
  for (int i = 0; i < 256; ++i) seen[lut_index(static_cast<double>(i) / 255.0)]++;
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST_CASE("quantization fidelity on the 256-level grid") {
  for (int i = 0; i < 256; ++i) {
    const double v = static_cast<double>(i) / 255.0;
    CHECK(std::abs(lut_index(v) / 255.0 - v) <= 1.0 / 255.0);
  }
}

TEST_CASE("apply_colormap maps endpoints and midpoint") {
  const auto& lut = viridis();
  SegmentMatrix m{1, 3, {0.0, 0.5, 1.0}};
  const auto img = apply_colormap(m, lut);
  CHECK(img.height == 1);
  CHECK(img.width == 3);
  CHECK(img.pixel(0, 0) == lut.entries[0]);
  CHECK(img.pixel(0, 1) == lut.entries[128]);
  CHECK(img.pixel(0, 2) == lut.entries[255]);
}

TEST_CASE("default LUT asset") {
  const auto& lut = viridis();
  CHECK(lut.entries.size() == 256);
  CHECK(lut_checksum(lut) == kViridisChecksum);
  CHECK(lut.entries[0] == Rgb{68, 1, 84});
  CHECK(lut.entries[255] == Rgb{253, 231, 37});
  for (std::size_t i = 1; i < 256; ++i) CHECK(luminance(lut.entries[i]) >= luminance(lut.entries[i - 1]));
}

TEST_CASE("LUT files") {
  std::string text = "# gray\n";
  for (int i = 0; i < 256; ++i) text += std::to_string(i) + ", " + std::to_string(i) + " " + std::to_string(i) + "\n";
  const auto gray = parse_lut(text, "gray");
  CHECK(gray.entries[77] == Rgb{77, 77, 77});
  CHECK(error_of([] { parse_lut("1 2 3\n", "short"); }) == Errc::InvalidSpec);
  CHECK(error_of([&] { parse_lut(text + "1 1 1\n", "long"); }) == Errc::InvalidSpec);
  std::string out_of_range;
  for (int i = 0; i < 255; ++i) out_of_range += "0 0 0\n";
  CHECK(error_of([&] { parse_lut(out_of_range + "300 0 0\n", "range"); }) == Errc::InvalidSpec);

  testing::TempDir dir;
  std::ofstream(dir / "gray.lut") << text;
  CHECK(resolve_lut((dir / "gray.lut").string()).entries[200] == Rgb{200, 200, 200});
  CHECK(resolve_lut("viridis").entries == viridis().entries);
  CHECK(error_of([&] { resolve_lut((dir / "absent.lut").string()); }) == Errc::MissingInput);
}

TEST_CASE("nearest resize") {
  RgbImage img{2, 2, {1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4}};
  CHECK(resize_nearest(img, 2, 2) == img);
  const auto big = resize_nearest(img, 4, 4);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) CHECK(big.pixel(y, x) == img.pixel(y / 2, x / 2));
  }
  CHECK(error_of([&] { resize_nearest(img, 0, 4); }) == Errc::ZeroDimension);
  CHECK(error_of([] { resize_nearest(RgbImage{}, 4, 4); }) == Errc::ZeroDimension);
}

TEST_CASE("nearest resize follows the index formula") {
  Rng rng(8);
  RgbImage img{25, 100, std::vector<std::uint8_t>(25 * 100 * 3)};
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  const auto out = resize_nearest(img, 224, 224);
  for (std::size_t y = 0; y < 224; ++y) {
    for (std::size_t x = 0; x < 224; ++x) REQUIRE(out.pixel(y, x) == img.pixel(y * 25 / 224, x * 100 / 224));
  }
}

TEST_CASE("bilinear resize keeps constant images constant") {
  RgbImage img{3, 5, std::vector<std::uint8_t>(45, 99)};
  const auto out = resize_bilinear(img, 17, 11);
  CHECK(out.height == 17);
  CHECK(std::all_of(out.pixels.begin(), out.pixels.end(), [](auto v) { return v == 99; }));
  CHECK(parse_resize_mode("bilinear") == ResizeMode::Bilinear);
  CHECK(error_of([] { parse_resize_mode("cubic"); }) == Errc::InvalidSpec);
}

TEST_CASE("encode_window shape, palette and purity") {
  Rng rng(2);
  const auto block = random_block(rng, 1, 2500);
  const ingest::WindowSpec spec;
  const auto img = encode_window(block, spec, 500.0, viridis());
  CHECK(img.image.height == 224);
  CHECK(img.image.width == 224);
  CHECK(img.image.pixels.size() == 224 * 224 * 3);
  const auto colors = palette(viridis());
  for (std::size_t y = 0; y < 224; ++y) {
    for (std::size_t x = 0; x < 224; ++x) {
      const auto p = img.image.pixel(y, x);
      REQUIRE(colors.count({p.r, p.g, p.b}) == 1);
    }
  }
  CHECK(encode_window(block, spec, 500.0, viridis()) == img);
}

TEST_CASE("constant block maps to the middle of the palette") {
  const std::vector<std::vector<double>> zeros(1, std::vector<double>(2500, 0.0));
  const auto img = encode_window(zeros, ingest::WindowSpec{}, 500.0, viridis());
  for (std::size_t i = 0; i < 224 * 224; ++i) CHECK(img.image.pixel(i / 224, i % 224) == viridis().entries[128]);
}

TEST_CASE("column isolation") {
  Rng rng(12);
  auto block = random_block(rng, 2, 2500);
  const ingest::WindowSpec spec;
  const auto before = apply_colormap(normalize_columns(segment_window(block, spec, 500.0)), viridis());
  const std::size_t j = 37;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = j * 25; i < (j + 1) * 25; ++i) block[c][i] = rng.uniform(-500.0, 500.0);
  }
  const auto after = apply_colormap(normalize_columns(segment_window(block, spec, 500.0)), viridis());
  bool changed = false;
  for (std::size_t y = 0; y < before.height; ++y) {
    for (std::size_t x = 0; x < before.width; ++x) {
      if (x == j) changed |= !(before.pixel(y, x) == after.pixel(y, x));
      else REQUIRE(before.pixel(y, x) == after.pixel(y, x));
    }
  }
  CHECK(changed);
}

TEST_CASE("encode_recording attaches labels and provenance") {
  ingest::SynthSpec spec;
  spec.windows_per_class = 3;
  const auto rec = ingest::synthesize_recording(spec);
  const auto images = encode_recording(rec, ingest::WindowSpec{}, viridis(), EncodeOptions{32, 48});
  REQUIRE(images.size() == 6);
  const auto windows = ingest::iter_windows(rec, ingest::WindowSpec{});
  for (std::size_t i = 0; i < images.size(); ++i) {
    CHECK(images[i].window_index == i);
    CHECK(images[i].label == windows[i].label);
    CHECK(images[i].source_id == rec.source_id);
    CHECK(images[i].image.height == 32);
    CHECK(images[i].image.width == 48);
  }
}

TEST_CASE(".eegimg layout and round trip") {
  EegImage img;
  img.image = RgbImage{2, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18}};
  img.label = 3;
  img.source_id = "rec";
  img.window_index = 0x01020304;
  const auto bytes = serialize_image(img);
  const std::vector<std::uint8_t> header{'E', 'E', 'G', 'I', 1, 0, 2, 0, 3, 0, 3, 0, 3, 0, 'r', 'e', 'c', 4, 3, 2, 1};
  REQUIRE(bytes.size() == header.size() + 18);
  CHECK(std::equal(header.begin(), header.end(), bytes.begin()));
  CHECK(deserialize_image(bytes) == img);

  img.label.reset();
  const auto unlabeled = serialize_image(img);
  CHECK(unlabeled[10] == 0xff);
  CHECK(unlabeled[11] == 0xff);
  CHECK(deserialize_image(unlabeled) == img);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK(error_of([&] { deserialize_image(bad); }) == Errc::BadMagic);
  bad = bytes;
  bad[4] = 2;
  CHECK(error_of([&] { deserialize_image(bad); }) == Errc::VersionMismatch);
  bad = bytes;
  bad.pop_back();
  CHECK(error_of([&] { deserialize_image(bad); }) == Errc::TruncatedPayload);
  bad = bytes;
  bad.push_back(0);
  CHECK(error_of([&] { deserialize_image(bad); }) == Errc::TrailingGarbage);
}

TEST_CASE("image files, PNG export and manifests") {
  testing::TempDir dir;
  Rng rng(3);
  std::vector<EegImage> images;
  std::string manifest;
  for (int i = 0; i < 3; ++i) {
    EegImage img;
    img.image = encode_window(random_block(rng, 1, 2500), ingest::WindowSpec{}, 500.0, viridis()).image;
    img.label = i == 1 ? std::nullopt : std::optional<int>(i);
    img.source_id = "s";
    img.window_index = static_cast<std::uint32_t>(i);
    const std::string name = "img" + std::to_string(i) + ".eegimg";
    write_image(dir / name, img);
    CHECK(read_image(dir / name) == img);
    manifest += manifest_line(ManifestEntry{name, img.label, img.source_id, img.window_index}) + "\n";
    images.push_back(img);
  }
  std::ofstream(dir / "manifest.jsonl") << manifest;
  CHECK(load_manifest_images(dir / "manifest.jsonl") == images);
  const auto entries = parse_manifest(manifest);
  REQUIRE(entries.size() == 3);
  CHECK(entries[1].label == std::nullopt);
  CHECK(error_of([] { parse_manifest("{\"file\": 3}\n"); }) == Errc::ConfigParse);

  write_png(dir / "a.png", images[0].image);
  const auto png = read_file_bytes(dir / "a.png");
  REQUIRE(png.size() > 8);
  CHECK(png[1] == 'P');
  CHECK(png[2] == 'N');
  CHECK(png[3] == 'G');
  CHECK(error_of([&] { read_image(dir / "missing.eegimg"); }) == Errc::MissingInput);
}
