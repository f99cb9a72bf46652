// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace boxsynth {

enum class ErrorCode {
  kInvalidParams,
  kRadiusTooLarge,
  kUnsupportedBevel,
  kSelfIntersection,
  kNotOrientable,
  kEmptyMesh,
  kInvalidArgument,
  kNonFinite,
  kIo,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kDimensionMismatch,
  kMalformedPayload,
  kMalformedJson,
  kConfigInvalid,
  kConfigNotFound,
  kMissingSample,
  kDuplicateIndex,
  kInvalidRotation,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `code()` identifies the failure
/// class; `field()` names the offending parameter or path when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {})
      : std::runtime_error(std::move(message)), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace boxsynth
