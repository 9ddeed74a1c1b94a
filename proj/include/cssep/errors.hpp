#pragma once

#include <stdexcept>
#include <string>

namespace cssep {

enum class ErrorCode {
  DimensionMismatch,
  NotCompletelySymmetric,
  ZeroVectorAtom,
  UnknownExampleId,
  DenseCapExceeded,
  MalformedFile,
  UnsupportedVersion,
  SingularKKTSystem,
  DegenerateDirection,
  GramIllConditioned,
  InnerSolverFailed,
  UnsupportedDimension,
};

const char* to_string(ErrorCode code);

/// Exception carrying one of the library error codes. The message is free
/// text; callers that branch on the failure should inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cssep
