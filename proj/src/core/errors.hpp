#pragma once

#include <stdexcept>
#include <string>

namespace nrc {

enum class ErrorCode {
  InvalidArgument,
  NotFinite,
  NotPositiveDefinite,
  NoConvergence,
  Divergence,
  FormatError,
  Mismatch,
  IoError,
  Precondition,
  Internal,
};

// All failures in the core surface as Error; the C API maps `code` to
// nrc_status values one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace nrc
