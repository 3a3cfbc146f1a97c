#pragma once

#include <optional>
#include <vector>

#include "syncomm/graph.hpp"
#include "syncomm/lanczos.hpp"
#include "syncomm/operators.hpp"

namespace syncomm {

struct DominantPair {
  double value = 0.0;
  std::vector<double> vector;  // unit 2-norm, oriented to a non-negative sum
  double residual = 0.0;
};

/// λ_max(A) and its eigenvector, residual ≤ 1e-9.
DominantPair lambda_max_adjacency(const Graph& g);

/// Operator with α defaulted to λ_max(A) when the kind needs one and none is
/// given. Such operators carry AlphaSource::kLambdaMax.
InteractionOperator make_operator(const Graph& g, OperatorKind kind,
                                  std::optional<double> alpha = std::nullopt);

struct Spectrum {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // empty unless requested
  OperatorKind kind = OperatorKind::kLaplacian;
  double alpha = 0.0;
  SolverReport report;
};

/// The k smallest eigenvalues. RandomWalkNorm is solved through its
/// similarity transform to SymNorm; its eigenvectors are mapped back by D^{1/2}.
Spectrum smallest_eigenvalues(const InteractionOperator& op, std::size_t k,
                              bool with_vectors = false);

/// Every eigenvalue up to and including the first one above `threshold`.
Spectrum eigenvalues_through(const InteractionOperator& op, double threshold);

/// 1e-8 × the operator's spectral upper bound.
double default_zero_tolerance(const InteractionOperator& op);

std::size_t count_zero_eigenvalues(const InteractionOperator& op,
                                   std::optional<double> tol = std::nullopt);

/// Smallest eigenvalue above the zero tolerance.
double smallest_positive_eigenvalue(const InteractionOperator& op);

/// 1/λ₂ with λ₂ the smallest positive eigenvalue. Connected graphs only.
double sync_timescale(const InteractionOperator& op);

}  // namespace syncomm
