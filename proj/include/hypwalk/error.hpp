#pragma once

#include <stdexcept>
#include <string>

namespace hypwalk {

// Every recoverable domain failure carries one of these codes so callers
// (tests, the CLI error envelope) can react to the condition, not the text.
enum class ErrorCode {
  invalid_argument,
  point_outside_disk,
  degenerate_geodesic,
  orientation_reversing,
  no_intersection,
  sides_do_not_meet,
  degenerate_angle,
  target_unreachable,
  degenerate_vertex,
  no_integer_cycle,
  dual_trick_required,
  precondition_violated,
  precondition_angle_sum,
  reconstruction_failed,
  non_convergence,
  degenerate_denominator,
  infinite_distance,
  no_witness_guarantee,
  symbol_mismatch,
  insufficient_sample,
  support_too_large,
  not_geometrically_symmetric,
  angle_not_submultiple,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::point_outside_disk: return "PointOutsideDisk";
    case ErrorCode::degenerate_geodesic: return "DegenerateGeodesic";
    case ErrorCode::orientation_reversing: return "OrientationReversing";
    case ErrorCode::no_intersection: return "NoIntersection";
    case ErrorCode::sides_do_not_meet: return "SidesDoNotMeet";
    case ErrorCode::degenerate_angle: return "DegenerateAngle";
    case ErrorCode::target_unreachable: return "TargetUnreachable";
    case ErrorCode::degenerate_vertex: return "DegenerateVertex";
    case ErrorCode::no_integer_cycle: return "NoIntegerCycle";
    case ErrorCode::dual_trick_required: return "DualTrickRequired";
    case ErrorCode::precondition_violated: return "PreconditionViolated";
    case ErrorCode::precondition_angle_sum: return "PreconditionAngleSum";
    case ErrorCode::reconstruction_failed: return "ReconstructionFailed";
    case ErrorCode::non_convergence: return "NonConvergence";
    case ErrorCode::degenerate_denominator: return "DegenerateDenominator";
    case ErrorCode::infinite_distance: return "InfiniteDistance";
    case ErrorCode::no_witness_guarantee: return "NoWitnessGuarantee";
    case ErrorCode::symbol_mismatch: return "SymbolMismatch";
    case ErrorCode::insufficient_sample: return "InsufficientSample";
    case ErrorCode::support_too_large: return "SupportTooLarge";
    case ErrorCode::not_geometrically_symmetric: return "NotGeometricallySymmetric";
    case ErrorCode::angle_not_submultiple: return "AngleNotSubmultiple";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace hypwalk
