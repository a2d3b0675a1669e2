// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/error.hpp"

namespace asclt {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotStabilizable: return "NotStabilizable";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidHorizon: return "InvalidHorizon";
    case ErrorCode::kInvalidStep: return "InvalidStep";
    case ErrorCode::kOutOfHorizon: return "OutOfHorizon";
    case ErrorCode::kWeightNotIntegrable: return "WeightNotIntegrable";
    case ErrorCode::kWeightMismatch: return "WeightMismatch";
    case ErrorCode::kMissingEvalTime: return "MissingEvalTime";
    case ErrorCode::kDomainTooSmall: return "DomainTooSmall";
    case ErrorCode::kTooFewAtoms: return "TooFewAtoms";
    case ErrorCode::kNonScalarMeasure: return "NonScalarMeasure";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kConditionsFailed: return "ConditionsFailed";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace asclt
