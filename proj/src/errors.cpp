#include "thinobs/errors.hpp"

namespace thinobs {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::EmptyFreeBoundary: return "EmptyFreeBoundary";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::TauOutOfRange: return "TauOutOfRange";
    case ErrorCode::GraphTooRough: return "GraphTooRough";
    case ErrorCode::DivisionNearZero: return "DivisionNearZero";
    case ErrorCode::MonotonicityViolated: return "MonotonicityViolated";
    case ErrorCode::ResampleGap: return "ResampleGap";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::AxisSingularity: return "AxisSingularity";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::BoundaryConditionViolated: return "BoundaryConditionViolated";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace thinobs
