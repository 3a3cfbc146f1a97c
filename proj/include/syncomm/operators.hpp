#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "syncomm/graph.hpp"

namespace syncomm {

/// The linear interaction operators driving dθ/dt = ω − c·op(A)·θ.
enum class OperatorKind {
  kLaplacian,        // D − A
  kRandomWalkNorm,   // I − A·D⁻¹
  kSymNorm,          // I − D^{-1/2}·A·D^{-1/2}
  kReplicator,       // α·I − A
  kScaledAdjacency,  // I − α⁻¹·A
  kModularity,       // d·dᵀ/2m − A
};

inline constexpr OperatorKind kAllOperatorKinds[] = {
    OperatorKind::kLaplacian,  OperatorKind::kRandomWalkNorm,  OperatorKind::kSymNorm,
    OperatorKind::kReplicator, OperatorKind::kScaledAdjacency, OperatorKind::kModularity};

/// CLI names: laplacian, rw-norm, sym-norm, replicator, scaled-adj, modularity.
std::string_view to_string(OperatorKind kind);
OperatorKind parse_operator_kind(std::string_view name);

constexpr bool requires_alpha(OperatorKind kind) {
  return kind == OperatorKind::kReplicator || kind == OperatorKind::kScaledAdjacency;
}
constexpr bool is_symmetric(OperatorKind kind) { return kind != OperatorKind::kRandomWalkNorm; }
constexpr bool is_conservative(OperatorKind kind) {
  return kind == OperatorKind::kLaplacian || kind == OperatorKind::kRandomWalkNorm ||
         kind == OperatorKind::kSymNorm;
}
constexpr bool divides_by_degree(OperatorKind kind) {
  return kind == OperatorKind::kRandomWalkNorm || kind == OperatorKind::kSymNorm;
}

/// Where an operator's α came from. Spectral α tracks λ_max(A) of whatever
/// graph the operator is rebuilt on (e.g. per connected component).
enum class AlphaSource { kNone, kUser, kLambdaMax };

/// Matrix-free interaction operator over a borrowed graph.
///
/// The graph must outlive the operator. `apply` is parallel over rows and
/// bitwise identical to `apply_serial` for every thread count.
class InteractionOperator {
 public:
  InteractionOperator(const Graph& g, OperatorKind kind, std::optional<double> alpha,
                      AlphaSource source = AlphaSource::kUser);

  OperatorKind kind() const { return kind_; }
  const Graph& graph() const { return *graph_; }
  std::size_t size() const { return graph_->node_count(); }
  /// α for Replicator and ScaledAdjacency, 0 otherwise.
  double alpha() const { return alpha_; }
  AlphaSource alpha_source() const { return alpha_source_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  void apply_serial(std::span<const double> x, std::span<double> y) const;

  /// Bound on |λ| over the operator's spectrum from degrees and α alone:
  /// 2·dmax (Laplacian, Modularity), 2 (normalized kinds), α + dmax
  /// (Replicator), 1 + dmax/α (ScaledAdjacency).
  double spectral_upper_bound() const;

  /// Same kind and α policy on another graph. Spectral α is recomputed by
  /// the caller; see `make_operator`.
  InteractionOperator rebind(const Graph& g, std::optional<double> alpha) const;

 private:
  double row(std::size_t i, std::span<const double> x, double rank_one) const;
  double rank_one_term(std::span<const double> x) const;

  const Graph* graph_;
  OperatorKind kind_;
  double alpha_ = 0.0;
  AlphaSource alpha_source_ = AlphaSource::kNone;
  std::vector<double> degree_scale_;  // 1/d or 1/√d for the normalized kinds
  double two_m_ = 0.0;
};

/// Validating constructor: α must be given exactly when the kind uses it and
/// must be finite and positive; the normalized kinds reject zero-degree nodes
/// and Modularity rejects edgeless graphs.
InteractionOperator build_operator(const Graph& g, OperatorKind kind,
                                   std::optional<double> alpha = std::nullopt);

/// w with wᵀ·op = 0, normalized to unit sum. Replicator and ScaledAdjacency
/// need a connected graph and α = λ_max; α > λ_max has no null vector.
std::vector<double> left_null_vector(const InteractionOperator& op);

/// v with op·v = 0, normalized to unit sum; the direction of the ω = 0 steady
/// state (ones, degrees, √degrees or the dominant adjacency eigenvector).
std::vector<double> right_null_vector(const InteractionOperator& op);

}  // namespace syncomm
