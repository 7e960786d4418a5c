#include "error.hpp"

namespace bandgs {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::FamilyDimensionMismatch: return "FamilyDimensionMismatch";
    case ErrorCode::NonconvergentQuadrature: return "NonconvergentQuadrature";
    case ErrorCode::DiscontinuityOnShell: return "DiscontinuityOnShell";
    case ErrorCode::DualTermNonzero: return "DualTermNonzero";
    case ErrorCode::InvalidPerturbation: return "InvalidPerturbation";
    case ErrorCode::UnsupportedUnion: return "UnsupportedUnion";
  }
  return "Unknown";
}

}  // namespace bandgs
