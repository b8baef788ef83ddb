#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ihsmm {

enum class ErrorCode {
  UnknownSymbol,
  EmptySequence,
  SchemaError,
  ValidationError,
  IoError,
  InvalidDims,
  InvalidArgument,
  LengthExceeded,
  DegenerateLattice,
  ImpossibleSequence,
  TooLarge,
  InvalidThresholds,
  UnknownScaleValue,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above. Codes
/// describing bad input (schema, validation, unknown symbols, bad arguments)
/// are "validation" errors; the rest are runtime failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// 1-based line of the offending record, for file parsers.
  std::optional<std::size_t> line() const noexcept { return line_; }
  bool is_validation() const noexcept;

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace ihsmm
