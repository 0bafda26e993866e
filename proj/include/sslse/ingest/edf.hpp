#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sslse/ingest/recording.hpp"

namespace sslse::ingest {

struct EdfSignalHeader {
  std::string label;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  std::int32_t digital_min = -32768;
  std::int32_t digital_max = 32767;
  std::size_t samples_per_record = 0;
};

/// Fixed-width ASCII header of a plain (non-EDF+) EDF file.
struct EdfHeader {
  std::string version;
  std::string patient_id;
  std::string recording_id;
  std::int64_t num_records = 0;  // -1 when unknown at write time
  double record_duration_s = 0.0;
  std::vector<EdfSignalHeader> signals;

  std::size_t header_bytes() const noexcept { return 256 + 256 * signals.size(); }
};

/// Parses the header only. Errors: TruncatedHeader, BadMagic, InvalidSpec.
EdfHeader parse_edf_header(std::span<const std::uint8_t> bytes);

/// Decodes a uniform-rate EDF file into physical units.
/// Errors: TruncatedHeader, BadMagic, InconsistentRates, ScaleUndefined,
/// TruncatedPayload.
EegRecording parse_edf(std::span<const std::uint8_t> bytes);

/// Encodes a recording as 16-bit EDF. Each channel's physical range is its
/// own min/max, so the quantization step is (max - min) / 65535. Window
/// labels are not representable in EDF and are dropped.
std::vector<std::uint8_t> write_edf(const EegRecording& rec);

}  // namespace sslse::ingest
