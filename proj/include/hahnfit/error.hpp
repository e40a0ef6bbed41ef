#pragma once

#include <stdexcept>
#include <string>

namespace hahnfit {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  DegenerateLattice,
  LatticeMismatch,
  MalformedHeader,
  MalformedEpochLine,
  UnknownVersion,
  InsufficientCoverage,
  WindowTooNoisy,
  Unclassifiable,
  Io,
};

// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { Usage, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept;

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

inline ErrorCategory Error::category() const noexcept {
  switch (code_) {
    case ErrorCode::InvalidArgument:
      return ErrorCategory::Usage;
    case ErrorCode::NonConvergence:
    case ErrorCode::DegenerateLattice:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateLattice: return "DegenerateLattice";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedEpochLine: return "MalformedEpochLine";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
    case ErrorCode::WindowTooNoisy: return "WindowTooNoisy";
    case ErrorCode::Unclassifiable: return "Unclassifiable";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace hahnfit
