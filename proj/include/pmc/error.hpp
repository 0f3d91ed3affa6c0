#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmc {

enum class ErrorCode {
  NonFinite,
  OrderTooHigh,
  IndexOutOfOrder,
  DimensionMismatch,
  DegreeMismatch,
  DegreeOverflow,
  NotAntisymmetric,
  SingularMetric,
  LeftChartDomain,
  NotFlat,
  HasTorsion,
  DegeneratePoisson,
  NoFlatFrame,
  ReconstructionMismatch,
  UnknownEntry,
  SyntaxError,
  UnknownCoordinate,
  AsymmetryError,
  SymmetryError,
  InvalidInput,
  PostconditionFailed,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::IndexOutOfOrder: return "IndexOutOfOrder";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::LeftChartDomain: return "LeftChartDomain";
    case ErrorCode::NotFlat: return "NotFlat";
    case ErrorCode::HasTorsion: return "HasTorsion";
    case ErrorCode::DegeneratePoisson: return "DegeneratePoisson";
    case ErrorCode::NoFlatFrame: return "NoFlatFrame";
    case ErrorCode::ReconstructionMismatch: return "ReconstructionMismatch";
    case ErrorCode::UnknownEntry: return "UnknownEntry";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownCoordinate: return "UnknownCoordinate";
    case ErrorCode::AsymmetryError: return "AsymmetryError";
    case ErrorCode::SymmetryError: return "SymmetryError";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::PostconditionFailed: return "PostconditionFailed";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception; the code
/// identifies the failure class, the message carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Chart-file errors additionally carry the 1-based line they were raised on
/// (0 when the error is not tied to a single line).
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, int line, const std::string& what)
      : Error(code, line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace pmc
