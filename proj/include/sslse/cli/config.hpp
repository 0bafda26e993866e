#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sslse/eval/train.hpp"
#include "sslse/imaging/encode.hpp"
#include "sslse/ingest/recording.hpp"
#include "sslse/ingest/synth.hpp"
#include "sslse/model/encoder.hpp"
#include "sslse/ssl/pretrain.hpp"

namespace sslse::cli {

inline constexpr int kSchemaVersion = 1;

struct IngestSection {
  /// .edf, .csv or an image manifest (.jsonl). Absent: synthesize from `synth`.
  std::optional<std::string> source;
  double csv_rate_hz = 500.0;
  ingest::SynthSpec synth;
  /// Falls back to the top-level seed when absent.
  std::optional<std::uint64_t> synth_seed;
};

struct ImagingSection {
  std::string lut = "viridis";
  imaging::ResizeMode resize_mode = imaging::ResizeMode::Nearest;
  std::size_t out_height = 224;
  std::size_t out_width = 224;
  std::string out_dir = "images";
  bool png = false;
};

struct RunConfig {
  std::uint64_t seed = 0;
  IngestSection ingest;
  ingest::WindowSpec window;
  ImagingSection imaging;
  model::EncoderConfig model;
  /// encoder and seed are taken from `model` and `seed`.
  ssl::PretrainConfig ssl;
  /// seed is taken from `seed`.
  eval::FinetuneConfig eval;

  ingest::SynthSpec synth_spec() const;
  ssl::PretrainConfig pretrain_config() const;
  eval::FinetuneConfig finetune_config() const;
  imaging::EncodeOptions encode_options() const;
};

/// Strict JSON reader: every section and key is optional, unknown keys and
/// wrongly typed values raise ConfigParse naming the key, and
/// schema_version must equal kSchemaVersion (SchemaVersionMismatch).
/// Relative ingest.source paths are resolved against base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Errors: MissingInput, plus those of parse_config.
RunConfig load_config(const std::filesystem::path& path);

/// Complete effective configuration; parse_config(config_to_json(c)) == c.
std::string config_to_json(const RunConfig& cfg);

}  // namespace sslse::cli
