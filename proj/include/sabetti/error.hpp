#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sabetti {

enum class ErrorKind {
  ZeroPolynomial,
  NotIsolating,
  DegenerateDegree,
  DimensionMismatch,
  SyntaxError,
  ArityError,
  ScheduleTooShort,
  NotInSet,
  UnboundedSet,
  NotPClosed,
  CoverageGap,
  AmbiguousInclusion,
  IncompleteIncidence,
  NegativeBetti,
  DimensionUnsupported,
  OddDegree,
  DegreeTooSmall,
  NotStabilized,
  BranchMatchFailure,
  NonBoundedCurve,
  PointNotOnCurve,
  ResolutionExhausted,
  NotConverged,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}
  ErrorKind kind() const { return kind_; }
  /// what() without the kind prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& what)
      : Error(ErrorKind::SyntaxError, "at offset " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace sabetti
