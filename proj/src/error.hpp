#pragma once

#include <stdexcept>
#include <string>

namespace bandgs {

enum class ErrorCode {
  InvalidArgument,
  DegenerateBasis,
  FamilyDimensionMismatch,
  NonconvergentQuadrature,
  DiscontinuityOnShell,
  DualTermNonzero,
  InvalidPerturbation,
  UnsupportedUnion,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every domain failure raised by the core carries one of the codes above; the
// C API maps them one-to-one onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace bandgs
