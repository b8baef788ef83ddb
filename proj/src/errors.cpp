#include "ihsmm/errors.hpp"

namespace ihsmm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LengthExceeded: return "LengthExceeded";
    case ErrorCode::DegenerateLattice: return "DegenerateLattice";
    case ErrorCode::ImpossibleSequence: return "ImpossibleSequence";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidThresholds: return "InvalidThresholds";
    case ErrorCode::UnknownScaleValue: return "UnknownScaleValue";
  }
  return "Unknown";
}

namespace {

std::string decorate(const std::string& message, std::optional<std::size_t> line) {
  if (!line) return message;
  return "line " + std::to_string(*line) + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(message, line)), code_(code), line_(line) {}

bool Error::is_validation() const noexcept {
  switch (code_) {
    case ErrorCode::UnknownSymbol:
    case ErrorCode::EmptySequence:
    case ErrorCode::SchemaError:
    case ErrorCode::ValidationError:
    case ErrorCode::InvalidDims:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidThresholds:
    case ErrorCode::UnknownScaleValue:
      return true;
    default:
      return false;
  }
}

}  // namespace ihsmm
