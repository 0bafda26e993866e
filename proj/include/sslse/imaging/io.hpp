#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sslse/imaging/encode.hpp"

namespace sslse::imaging {

inline constexpr std::uint16_t kEegImageVersion = 1;

/// `.eegimg` v1, all integers little-endian, no padding:
///   "EEGI" | version u16 | height u16 | width u16 | label i16 (-1 unlabeled)
///   | source_id length u16 + UTF-8 | window_index u32 | h*w*3 RGB bytes
std::vector<std::uint8_t> serialize_image(const EegImage& img);

/// Errors: BadMagic, VersionMismatch, TruncatedPayload, TrailingGarbage.
EegImage deserialize_image(std::span<const std::uint8_t> bytes);

void write_image(const std::filesystem::path& path, const EegImage& img);
EegImage read_image(const std::filesystem::path& path);

/// 8-bit RGB PNG for inspection.
void write_png(const std::filesystem::path& path, const RgbImage& img);

struct ManifestEntry {
  std::string file;
  std::optional<int> label;
  std::string source_id;
  std::uint32_t window_index = 0;
};

/// One JSON object per line: {"file", "label", "source_id", "window_index"}.
std::string manifest_line(const ManifestEntry& entry);
std::vector<ManifestEntry> parse_manifest(const std::string& text);

/// Loads every image listed in a manifest; file paths are relative to the
/// manifest's directory.
std::vector<EegImage> load_manifest_images(const std::filesystem::path& manifest);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sslse::imaging
