#include "syncomm/error.hpp"

namespace syncomm {

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfiguration:
    case ErrorCode::kNotImplemented:
    case ErrorCode::kSizeCap:
    case ErrorCode::kGrid:
    case ErrorCode::kUnknownFeature:
    case ErrorCode::kInfeasible:
      return ErrorCategory::kUsage;
    case ErrorCode::kParse:
    case ErrorCode::kEmptyGraph:
    case ErrorCode::kDegenerateDegree:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kDisconnected:
    case ErrorCode::kNodeSetMismatch:
    case ErrorCode::kDegenerateOrdering:
    case ErrorCode::kIo:
      return ErrorCategory::kData;
    case ErrorCode::kNoNullVector:
    case ErrorCode::kSolverNotConverged:
    case ErrorCode::kDivergence:
    case ErrorCode::kSingularOperator:
    case ErrorCode::kDegenerateEquilibrium:
      return ErrorCategory::kNumerical;
  }
  return ErrorCategory::kData;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kEmptyGraph: return "empty graph";
    case ErrorCode::kDegenerateDegree: return "degenerate degree";
    case ErrorCode::kConfiguration: return "configuration error";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kNoNullVector: return "no null vector";
    case ErrorCode::kDisconnected: return "disconnected graph";
    case ErrorCode::kSolverNotConverged: return "solver did not converge";
    case ErrorCode::kDivergence: return "integration diverged";
    case ErrorCode::kSingularOperator: return "singular operator";
    case ErrorCode::kSizeCap: return "size above cap";
    case ErrorCode::kNotImplemented: return "not implemented";
    case ErrorCode::kGrid: return "time not on grid";
    case ErrorCode::kDegenerateEquilibrium: return "degenerate equilibrium";
    case ErrorCode::kDegenerateOrdering: return "degenerate ordering";
    case ErrorCode::kNodeSetMismatch: return "node set mismatch";
    case ErrorCode::kUnknownFeature: return "unknown feature";
    case ErrorCode::kInfeasible: return "infeasible parameters";
    case ErrorCode::kIo: return "i/o error";
  }
  return "error";
}

}  // namespace syncomm
