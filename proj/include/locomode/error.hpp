#pragma once

#include <stdexcept>
#include <string>

namespace locomode {

// Every failure the library can raise, by contract name. Tests match on the
// kind rather than parsing messages.
enum class ErrorKind {
  MissingChannel,
  BadLabel,
  NonMonotonicTime,
  NonFiniteSample,
  EmptyInput,
  ChannelMismatch,
  TooShort,
  TooFewFrames,
  InsufficientSamples,
  DimensionMismatch,
  ShapeMismatch,
  MixedShapes,
  NonFiniteLoss,
  LengthMismatch,
  CohortTooSmall,
  TrialCountTooSmall,
  BadCircuit,
  IoFailure,
  UnknownKey,
  MissingRequired,
  TypeError,
  NumericalFailure,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace locomode
