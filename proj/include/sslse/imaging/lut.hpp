#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sslse::imaging {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 256-entry colormap, index 0 for normalized value 0 and 255 for 1.
struct ColorLut {
  std::string name;
  std::array<Rgb, 256> entries{};
};

/// Matplotlib's viridis, quantized round-half-up to 8 bits. Two entries
/// (95 and 146) carry a one-step correction so that luminance never
/// decreases along the table.
const ColorLut& viridis();

/// FNV-1a 64 over the 768 table bytes in r, g, b order.
std::uint64_t lut_checksum(const ColorLut& lut) noexcept;

inline constexpr std::uint64_t kViridisChecksum = 0xffa003a6f3da3e47ULL;

/// Rec. 709 luma weights on the 8-bit values, scaled by 10000.
std::uint32_t luminance(const Rgb& c) noexcept;

/// Parses 256 lines of "r g b" (whitespace or comma separated, '#' comments).
ColorLut parse_lut(std::string_view text, std::string name);
ColorLut load_lut(const std::filesystem::path& path);

/// "viridis" or a path to a LUT file.
ColorLut resolve_lut(const std::string& name_or_path);

}  // namespace sslse::imaging
