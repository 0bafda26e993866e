#pragma once

#include <string_view>

#include "sslse/ingest/recording.hpp"

namespace sslse::ingest {

/// Rows are samples, columns are channels. A first row with no numeric cell
/// is taken as channel labels. CSV carries no rate, so it is an argument.
/// Errors: EmptyInput, RaggedRow, NonNumericCell.
EegRecording parse_csv(std::string_view text, double sample_rate_hz);

}  // namespace sslse::ingest
