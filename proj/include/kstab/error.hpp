#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kstab {

enum class ErrorCode {
  DimensionMismatch,
  IndexOutOfRange,
  UnboundedPolytope,
  EmptyInterior,
  RedundantLabel,
  NotInterior,
  DegenerateSimplex,
  InvalidFacet,
  NonpositiveWeight,
  NotReflexiveFiber,
  SingularMomentMatrix,
  FutakiNotVanishing,
  NotMonotoneFiber,
  NotFanoFibration,
  DegreeEscalationFailed,
  HypothesisViolatedOnBracket,
  InvalidInput,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnboundedPolytope: return "UnboundedPolytope";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::RedundantLabel: return "RedundantLabel";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::InvalidFacet: return "InvalidFacet";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::NotReflexiveFiber: return "NotReflexiveFiber";
    case ErrorCode::SingularMomentMatrix: return "SingularMomentMatrix";
    case ErrorCode::FutakiNotVanishing: return "FutakiNotVanishing";
    case ErrorCode::NotMonotoneFiber: return "NotMonotoneFiber";
    case ErrorCode::NotFanoFibration: return "NotFanoFibration";
    case ErrorCode::DegreeEscalationFailed: return "DegreeEscalationFailed";
    case ErrorCode::HypothesisViolatedOnBracket: return "HypothesisViolatedOnBracket";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type; `code()` is the
/// machine-readable part, `what()` carries the details (indices, points).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require_same_dim(std::size_t a, std::size_t b, std::string_view what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(a) + ", got " +
                    std::to_string(b));
  }
}

}  // namespace kstab
