#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace wcons {

enum class ErrorCode {
  InvalidInput,
  NotPositiveDefinite,
  DimensionMismatch,
  GridMismatch,
  BadWeights,
  MaxIterationsExceeded,
  DegenerateTrim,
  UnsupportedConfiguration,
  SingularSubset,
  ParseError,
};

const char* to_string(ErrorCode code) noexcept;

/// Base of every exception thrown by the library. `code()` identifies the
/// failure class; the CLI maps it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Validation failures (bad input) versus solver failures.
  bool is_validation_error() const noexcept;

 private:
  ErrorCode code_;
};

class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(double eigenvalue, std::optional<std::size_t> entry = std::nullopt);

  double eigenvalue() const noexcept { return eigenvalue_; }
  std::optional<std::size_t> entry() const noexcept { return entry_; }

 private:
  double eigenvalue_;
  std::optional<std::size_t> entry_;
};

}  // namespace wcons
