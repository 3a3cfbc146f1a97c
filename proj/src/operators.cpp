#include "syncomm/operators.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "syncomm/error.hpp"
#include "syncomm/spectral.hpp"

namespace syncomm {

namespace {

// Below this size the OpenMP fork/join costs more than the rows.
constexpr std::size_t kParallelRows = 4096;

// Relative slack when comparing a user α against λ_max.
constexpr double kAlphaMatchTol = 1e-8;

void check_size(std::span<const double> x, std::size_t n) {
  if (x.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "operator of size " + std::to_string(n) +
                                                   " applied to vector of size " +
                                                   std::to_string(x.size()));
  }
}

}  // namespace

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kLaplacian: return "laplacian";
    case OperatorKind::kRandomWalkNorm: return "rw-norm";
    case OperatorKind::kSymNorm: return "sym-norm";
    case OperatorKind::kReplicator: return "replicator";
    case OperatorKind::kScaledAdjacency: return "scaled-adj";
    case OperatorKind::kModularity: return "modularity";
  }
  return "unknown";
}

OperatorKind parse_operator_kind(std::string_view name) {
  for (OperatorKind kind : kAllOperatorKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::kConfiguration, "unknown operator kind '" + std::string(name) +
                                             "' (expected laplacian, rw-norm, sym-norm, "
                                             "replicator, scaled-adj or modularity)");
}

InteractionOperator::InteractionOperator(const Graph& g, OperatorKind kind,
                                         std::optional<double> alpha, AlphaSource source)
    : graph_(&g), kind_(kind) {
  if (requires_alpha(kind)) {
    if (!alpha) {
      throw Error(ErrorCode::kConfiguration,
                  std::string(to_string(kind)) + " operator requires alpha");
    }
    if (!std::isfinite(*alpha) || *alpha <= 0.0) {
      throw Error(ErrorCode::kConfiguration, "alpha must be finite and positive");
    }
    alpha_ = *alpha;
    alpha_source_ = source == AlphaSource::kNone ? AlphaSource::kUser : source;
  } else if (alpha) {
    throw Error(ErrorCode::kConfiguration,
                std::string(to_string(kind)) + " operator takes no alpha");
  }

  if (divides_by_degree(kind)) {
    degree_scale_.resize(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) {
      if (g.degree(i) == 0) {
        throw Error(ErrorCode::kDegenerateDegree,
                    "node '" + g.labels().id(i) + "' has degree 0; " +
                        std::string(to_string(kind)) + " divides by degree");
      }
      double d = static_cast<double>(g.degree(i));
      degree_scale_[i] = kind == OperatorKind::kRandomWalkNorm ? 1.0 / d : 1.0 / std::sqrt(d);
    }
  }
  if (kind == OperatorKind::kModularity) {
    if (g.edge_count() == 0) {
      throw Error(ErrorCode::kDegenerateDegree, "modularity operator needs at least one edge");
    }
    two_m_ = 2.0 * static_cast<double>(g.edge_count());
  }
}

InteractionOperator InteractionOperator::rebind(const Graph& g,
                                                std::optional<double> alpha) const {
  return InteractionOperator(g, kind_, requires_alpha(kind_) ? alpha : std::nullopt,
                             alpha_source_);
}

double InteractionOperator::rank_one_term(std::span<const double> x) const {
  if (kind_ != OperatorKind::kModularity) return 0.0;
  // Fixed summation order keeps apply deterministic across thread counts.
  double dot = 0.0;
  for (NodeId i = 0; i < x.size(); ++i) dot += static_cast<double>(graph_->degree(i)) * x[i];
  return dot / two_m_;
}

double InteractionOperator::row(std::size_t i, std::span<const double> x, double rank_one) const {
  const Graph& g = *graph_;
  auto nbrs = g.neighbors(i);
  switch (kind_) {
    case OperatorKind::kLaplacian: {
      double s = 0.0;
      for (NodeId j : nbrs) s += x[j];
      return static_cast<double>(nbrs.size()) * x[i] - s;
    }
    case OperatorKind::kRandomWalkNorm: {
      double s = 0.0;
      for (NodeId j : nbrs) s += x[j] * degree_scale_[j];
      return x[i] - s;
    }
    case OperatorKind::kSymNorm: {
      double s = 0.0;
      for (NodeId j : nbrs) s += x[j] * degree_scale_[j];
      return x[i] - degree_scale_[i] * s;
    }
    case OperatorKind::kReplicator: {
      double s = 0.0;
      for (NodeId j : nbrs) s += x[j];
      return alpha_ * x[i] - s;
    }
    case OperatorKind::kScaledAdjacency: {
      double s = 0.0;
      for (NodeId j : nbrs) s += x[j];
      return x[i] - s / alpha_;
    }
    case OperatorKind::kModularity: {
      double s = 0.0;
      for (NodeId j : nbrs) s += x[j];
      return static_cast<double>(nbrs.size()) * rank_one - s;
    }
  }
  return 0.0;
}

void InteractionOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  check_size(x, n);
  check_size(y, n);
  const double rank_one = rank_one_term(x);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelRows)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    y[static_cast<std::size_t>(i)] = row(static_cast<std::size_t>(i), x, rank_one);
  }
}

void InteractionOperator::apply_serial(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  check_size(x, n);
  check_size(y, n);
  const double rank_one = rank_one_term(x);
  for (std::size_t i = 0; i < n; ++i) y[i] = row(i, x, rank_one);
}

std::vector<double> InteractionOperator::apply(std::span<const double> x) const {
  std::vector<double> y(size());
  apply(x, y);
  return y;
}

double InteractionOperator::spectral_upper_bound() const {
  const double dmax = static_cast<double>(graph_->max_degree());
  switch (kind_) {
    case OperatorKind::kLaplacian:
    case OperatorKind::kModularity:
      return 2.0 * dmax;
    case OperatorKind::kRandomWalkNorm:
    case OperatorKind::kSymNorm:
      return 2.0;
    case OperatorKind::kReplicator:
      return alpha_ + dmax;
    case OperatorKind::kScaledAdjacency:
      return 1.0 + dmax / alpha_;
  }
  return 0.0;
}

InteractionOperator build_operator(const Graph& g, OperatorKind kind,
                                   std::optional<double> alpha) {
  return InteractionOperator(g, kind, alpha, alpha ? AlphaSource::kUser : AlphaSource::kNone);
}

namespace {

std::vector<double> normalized_to_unit_sum(std::vector<double> v) {
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
  return v;
}

std::vector<double> dominant_null_vector(const InteractionOperator& op) {
  const Graph& g = op.graph();
  if (connected_components(g).community_count() != 1) {
    throw Error(ErrorCode::kDisconnected,
                "dominant-eigenvector null vector needs a connected graph; "
                "work per connected component");
  }
  DominantPair dom = lambda_max_adjacency(g);
  const double target = op.alpha();
  const double slack = kAlphaMatchTol * std::max(1.0, dom.value);
  if (target > dom.value + slack) {
    throw Error(ErrorCode::kNoNullVector,
                "alpha " + std::to_string(target) + " exceeds lambda_max " +
                    std::to_string(dom.value) + ": the only equilibrium is zero");
  }
  if (target < dom.value - slack) {
    throw Error(ErrorCode::kConfiguration,
                "alpha " + std::to_string(target) + " is below lambda_max " +
                    std::to_string(dom.value) + ": dynamics have no steady state");
  }
  return normalized_to_unit_sum(std::move(dom.vector));
}

}  // namespace

std::vector<double> left_null_vector(const InteractionOperator& op) {
  const Graph& g = op.graph();
  const std::size_t n = g.node_count();
  switch (op.kind()) {
    case OperatorKind::kLaplacian:
    case OperatorKind::kRandomWalkNorm:
    case OperatorKind::kModularity:
      return std::vector<double>(n, 1.0 / static_cast<double>(n));
    case OperatorKind::kSymNorm: {
      std::vector<double> w(n);
      for (NodeId i = 0; i < n; ++i) w[i] = std::sqrt(static_cast<double>(g.degree(i)));
      return normalized_to_unit_sum(std::move(w));
    }
    case OperatorKind::kReplicator:
    case OperatorKind::kScaledAdjacency:
      return dominant_null_vector(op);
  }
  return {};
}

std::vector<double> right_null_vector(const InteractionOperator& op) {
  const Graph& g = op.graph();
  const std::size_t n = g.node_count();
  switch (op.kind()) {
    case OperatorKind::kRandomWalkNorm: {
      std::vector<double> v(n);
      for (NodeId i = 0; i < n; ++i) v[i] = static_cast<double>(g.degree(i));
      return normalized_to_unit_sum(std::move(v));
    }
    default:
      // Every other kind is symmetric.
      return left_null_vector(op);
  }
}

}  // namespace syncomm
