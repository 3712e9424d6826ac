#pragma once

#include <stdexcept>
#include <string>

namespace evfusion {

enum class ErrorKind {
  MassExceedsUnity,
  NegativeMass,
  InvalidDistribution,
  InvalidEventSpace,
  AxisOutOfRange,
  AxisMismatch,
  RhoOutOfRange,
  InsufficientInput,
  LengthMismatch,
  UnresolvedAtom,
  AmbiguousAtom,
  LabelMismatch,
  ZeroWeights,
  Capacity,
  TotalConflict,
  FrameMismatch,
  SingleClass,
  NonFinite,
  NotPositiveSemidefinite,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Thrown by every library operation on invalid input. `kind()` identifies the
/// failure class so callers (and the CLI's exit-code mapping) need not parse
/// the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace evfusion
