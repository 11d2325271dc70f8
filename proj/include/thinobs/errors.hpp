#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thinobs {

enum class ErrorCode {
  InvalidArgument,
  DegeneratePoint,
  MissingDerivative,
  OutOfDomain,
  SolverFailure,
  GridTooCoarse,
  NotConverged,
  EmptyFreeBoundary,
  DegenerateFit,
  TauOutOfRange,
  GraphTooRough,
  DivisionNearZero,
  MonotonicityViolated,
  ResampleGap,
  NegativeRadicand,
  AxisSingularity,
  InsufficientSamples,
  BoundaryConditionViolated,
  ConfigInvalid,
  IoFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Offending grid nodes are reported by flat index.
class MonotonicityViolated : public Error {
 public:
  MonotonicityViolated(const std::string& what, std::vector<std::size_t> nodes)
      : Error(ErrorCode::MonotonicityViolated, what), nodes_(std::move(nodes)) {}
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<std::size_t> nodes_;
};

}  // namespace thinobs
