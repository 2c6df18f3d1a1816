#pragma once

#include <stdexcept>
#include <string>

namespace se23lqr {

/// Error categories. The numeric values are part of the C API.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kNotOrthonormal = 2,
  kAngleAmbiguity = 3,
  kDegenerateReference = 4,
  kNotConverged = 5,
  kSingularMatrix = 6,
  kDimensionMismatch = 7,
  kIo = 8,
  kConfig = 9,
  kDiverged = 10,
  kInternal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace se23lqr
