// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_ERROR_HPP
#define ASCLT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace asclt {

enum class ErrorCode {
  kOk = 0,
  kInvalidArgument,
  kNotStabilizable,
  kSingular,
  kDimensionMismatch,
  kInvalidHorizon,
  kInvalidStep,
  kOutOfHorizon,
  kWeightNotIntegrable,
  kWeightMismatch,
  kMissingEvalTime,
  kDomainTooSmall,
  kTooFewAtoms,
  kNonScalarMeasure,
  kTooFewSamples,
  kConfigInvalid,
  kConditionsFailed,
  kIoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace asclt

#endif  // ASCLT_ERROR_HPP
