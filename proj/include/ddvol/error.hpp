#pragma once

#include <stdexcept>
#include <string>

namespace ddvol {

enum class ErrorCode {
  InvalidMap,
  NotAutomorphism,
  WrongOrder,
  NotFree,
  DegenerateTriangle,
  GluingMismatch,
  BadOrders,
  NonIntegralOrder,
  NotPrimitive,
  DisconnectedCover,
  NonIntegral,
  DimensionMismatch,
  DegenerateRestriction,
  RankDeficiency,
  UnsupportedD,
  FlipLimitExceeded,
  BoundViolated,
  DegenerateCycle,
  WitnessFailed,
  PreconditionFailed,
  ParseError,
  IoError,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidMap: return "InvalidMap";
    case ErrorCode::NotAutomorphism: return "NotAutomorphism";
    case ErrorCode::WrongOrder: return "WrongOrder";
    case ErrorCode::NotFree: return "NotFree";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::GluingMismatch: return "GluingMismatch";
    case ErrorCode::BadOrders: return "BadOrders";
    case ErrorCode::NonIntegralOrder: return "NonIntegralOrder";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::DisconnectedCover: return "DisconnectedCover";
    case ErrorCode::NonIntegral: return "NonIntegral";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateRestriction: return "DegenerateRestriction";
    case ErrorCode::RankDeficiency: return "RankDeficiency";
    case ErrorCode::UnsupportedD: return "UnsupportedD";
    case ErrorCode::FlipLimitExceeded: return "FlipLimitExceeded";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::DegenerateCycle: return "DegenerateCycle";
    case ErrorCode::WitnessFailed: return "WitnessFailed";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// Errors that can only arise from a defect, since they contradict a theorem.
inline bool is_theorem_failure(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DegenerateRestriction:
    case ErrorCode::RankDeficiency:
    case ErrorCode::FlipLimitExceeded:
    case ErrorCode::BoundViolated:
    case ErrorCode::WitnessFailed:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ddvol
