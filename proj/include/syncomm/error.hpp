#pragma once

#include <stdexcept>
#include <string>

namespace syncomm {

/// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorCategory {
  kUsage = 1,      // bad configuration or arguments
  kData = 2,       // malformed or unsuitable input data
  kNumerical = 3,  // solver or integrator failure
};

enum class ErrorCode {
  kParse,
  kEmptyGraph,
  kDegenerateDegree,
  kConfiguration,
  kDimensionMismatch,
  kNoNullVector,
  kDisconnected,
  kSolverNotConverged,
  kDivergence,
  kSingularOperator,
  kSizeCap,
  kNotImplemented,
  kGrid,
  kDegenerateEquilibrium,
  kDegenerateOrdering,
  kNodeSetMismatch,
  kUnknownFeature,
  kInfeasible,
  kIo,
};

ErrorCategory category_of(ErrorCode code);
const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorCategory category() const { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace syncomm
