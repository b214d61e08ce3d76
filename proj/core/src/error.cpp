#include "wcons/error.hpp"

#include <sstream>

namespace wcons {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::DegenerateTrim: return "DegenerateTrim";
    case ErrorCode::UnsupportedConfiguration: return "UnsupportedConfiguration";
    case ErrorCode::SingularSubset: return "SingularSubset";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool Error::is_validation_error() const noexcept {
  switch (code_) {
    case ErrorCode::MaxIterationsExceeded:
    case ErrorCode::DegenerateTrim:
    case ErrorCode::SingularSubset:
      return false;
    default:
      return true;
  }
}

namespace {

std::string npd_message(double eigenvalue, std::optional<std::size_t> entry) {
  std::ostringstream os;
  os << "matrix is not positive definite (eigenvalue " << eigenvalue << ")";
  if (entry) os << " at entry " << *entry;
  return os.str();
}

}  // namespace

NotPositiveDefiniteError::NotPositiveDefiniteError(double eigenvalue,
                                                   std::optional<std::size_t> entry)
    : Error(ErrorCode::NotPositiveDefinite, npd_message(eigenvalue, entry)),
      eigenvalue_(eigenvalue),
      entry_(entry) {}

}  // namespace wcons
