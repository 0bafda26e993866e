#include "sslse/imaging/io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include "json.hpp"
#include <sstream>

#include "sslse/error.hpp"

namespace sslse::imaging {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(Errc::TruncatedPayload, std::string(".eegimg ends inside ") + what);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_image(const EegImage& img) {
  if (img.height() > 0xffff || img.width() > 0xffff) throw Error(Errc::InvalidSpec, "image too large for .eegimg");
  if (img.image.pixels.size() != img.height() * img.width() * 3) {
    throw Error(Errc::InvalidSpec, "image pixel buffer does not match its dimensions");
  }
  if (img.source_id.size() > 0xffff) throw Error(Errc::InvalidSpec, "source_id longer than 65535 bytes");
  if (img.label && (*img.label < 0 || *img.label > 0x7fff)) throw Error(Errc::InvalidSpec, "label outside i16 range");
  std::vector<std::uint8_t> out{'E', 'E', 'G', 'I'};
  out.reserve(20 + img.source_id.size() + img.image.pixels.size());
  put_u16(out, kEegImageVersion);
  put_u16(out, static_cast<std::uint16_t>(img.height()));
  put_u16(out, static_cast<std::uint16_t>(img.width()));
  put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(img.label.value_or(-1))));
  put_u16(out, static_cast<std::uint16_t>(img.source_id.size()));
  out.insert(out.end(), img.source_id.begin(), img.source_id.end());
  put_u32(out, img.window_index);
  out.insert(out.end(), img.image.pixels.begin(), img.image.pixels.end());
  return out;
}

EegImage deserialize_image(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.take(4, "magic");
  if (!(magic[0] == 'E' && magic[1] == 'E' && magic[2] == 'G' && magic[3] == 'I')) {
    throw Error(Errc::BadMagic, "not an .eegimg file");
  }
  const auto version = r.u16("version");
  if (version != kEegImageVersion) {
    throw Error(Errc::VersionMismatch, ".eegimg version " + std::to_string(version) + ", reader supports " +
                                           std::to_string(kEegImageVersion));
  }
  EegImage img;
  img.image.height = r.u16("height");
  img.image.width = r.u16("width");
  const auto label = static_cast<std::int16_t>(r.u16("label"));
  if (label >= 0) img.label = label;
  const auto id_len = r.u16("source_id length");
  const auto id = r.take(id_len, "source_id");
  img.source_id.assign(id.begin(), id.end());
  img.window_index = r.u32("window_index");
  const auto pixels = r.take(img.height() * img.width() * 3, "pixel payload");
  img.image.pixels.assign(pixels.begin(), pixels.end());
  if (r.remaining() != 0) {
    throw Error(Errc::TrailingGarbage, std::to_string(r.remaining()) + " bytes after the pixel payload");
  }
  return img;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingInput, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

void write_image(const std::filesystem::path& path, const EegImage& img) {
  write_file_bytes(path, serialize_image(img));
}

EegImage read_image(const std::filesystem::path& path) { return deserialize_image(read_file_bytes(path)); }

void write_png(const std::filesystem::path& path, const RgbImage& img) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(Errc::Io, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::Io, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::Io, "libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() + y * img.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::string manifest_line(const ManifestEntry& entry) {
  nlohmann::ordered_json j;
  j["file"] = entry.file;
  j["label"] = entry.label ? nlohmann::ordered_json(*entry.label) : nlohmann::ordered_json(nullptr);
  j["source_id"] = entry.source_id;
  j["window_index"] = entry.window_index;
  return j.dump();
}

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
  std::vector<ManifestEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.file = j.at("file").get<std::string>();
      if (!j.at("label").is_null()) e.label = j.at("label").get<int>();
      e.source_id = j.at("source_id").get<std::string>();
      e.window_index = j.at("window_index").get<std::uint32_t>();
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::ConfigParse, "manifest line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

std::vector<EegImage> load_manifest_images(const std::filesystem::path& manifest) {
  const auto bytes = read_file_bytes(manifest);
  const auto entries = parse_manifest(std::string(bytes.begin(), bytes.end()));
  std::vector<EegImage> images;
  images.reserve(entries.size());
  for (const auto& e : entries) images.push_back(read_image(manifest.parent_path() / e.file));
  return images;
}

}  // namespace sslse::imaging
