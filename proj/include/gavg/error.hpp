#pragma once

#include <stdexcept>
#include <string>

namespace gavg {

enum class ErrorCode {
  kShapeMismatch,
  kNonFiniteValue,
  kTimeIndexGap,
  kUnknownChannel,
  kMixedGroup,
  kIncompatibleGrid,
  kInvalidArgument,
  kStabilityBound,
  kBlowUp,
  kIo,
  kVersionMismatch,
  kConfigMismatch,
  kDivergence,
  kMisalignment,
  kEmptyInput,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by rollout when a prediction leaves the finite range.
class RolloutError : public Error {
 public:
  RolloutError(int step, const std::string& what)
      : Error(ErrorCode::kDivergence, "step " + std::to_string(step) + ": " + what), step_(step) {}

  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace gavg
