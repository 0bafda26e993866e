#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sslse {

/// Error categories raised across the pipeline. The CLI prints the category
/// name on failure, tests match on it.
enum class Errc {
  // ingest
  TruncatedHeader,
  BadMagic,
  InconsistentRates,
  ScaleUndefined,
  RaggedRow,
  NonNumericCell,
  EmptyInput,
  WindowLongerThanRecording,
  InvalidSpec,
  // imaging
  NonIntegralSegment,
  ValueOutOfRange,
  ZeroDimension,
  VersionMismatch,
  TruncatedPayload,
  TrailingGarbage,
  Io,
  // autodiff
  ShapeMismatch,
  NonIntegralOutput,
  LabelOutOfRange,
  DegenerateNorm,
  NonScalarLoss,
  DoubleBackward,
  NotOnTape,
  // ssl
  NonUnitRows,
  NonPositiveTemperature,
  EmptyDataset,
  // eval
  MissingLabels,
  SingleClassSplit,
  EmptyMatrix,
  // cli
  ConfigParse,
  MissingInput,
  SchemaVersionMismatch,
  BadCheckpoint,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sslse
