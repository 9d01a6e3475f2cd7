#include "locomode/error.hpp"

namespace locomode {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingChannel: return "MissingChannel";
    case ErrorKind::BadLabel: return "BadLabel";
    case ErrorKind::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorKind::NonFiniteSample: return "NonFiniteSample";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ChannelMismatch: return "ChannelMismatch";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::TooFewFrames: return "TooFewFrames";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::MixedShapes: return "MixedShapes";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::CohortTooSmall: return "CohortTooSmall";
    case ErrorKind::TrialCountTooSmall: return "TrialCountTooSmall";
    case ErrorKind::BadCircuit: return "BadCircuit";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::MissingRequired: return "MissingRequired";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
  }
  return "Error";
}

}  // namespace locomode
