#include "sslse/error.hpp"

namespace sslse {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::TruncatedHeader: return "TruncatedHeader";
    case Errc::BadMagic: return "BadMagic";
    case Errc::InconsistentRates: return "InconsistentRates";
    case Errc::ScaleUndefined: return "ScaleUndefined";
    case Errc::RaggedRow: return "RaggedRow";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::WindowLongerThanRecording: return "WindowLongerThanRecording";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::NonIntegralSegment: return "NonIntegralSegment";
    case Errc::ValueOutOfRange: return "ValueOutOfRange";
    case Errc::ZeroDimension: return "ZeroDimension";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::TrailingGarbage: return "TrailingGarbage";
    case Errc::Io: return "Io";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonIntegralOutput: return "NonIntegralOutput";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::DegenerateNorm: return "DegenerateNorm";
    case Errc::NonScalarLoss: return "NonScalarLoss";
    case Errc::DoubleBackward: return "DoubleBackward";
    case Errc::NotOnTape: return "NotOnTape";
    case Errc::NonUnitRows: return "NonUnitRows";
    case Errc::NonPositiveTemperature: return "NonPositiveTemperature";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::MissingLabels: return "MissingLabels";
    case Errc::SingleClassSplit: return "SingleClassSplit";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::MissingInput: return "MissingInput";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::BadCheckpoint: return "BadCheckpoint";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace sslse
