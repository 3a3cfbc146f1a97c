#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "syncomm/graph.hpp"
#include "syncomm/operators.hpp"
#include "syncomm/partition.hpp"

namespace syncomm {
struct SimulationEnsemble;
}

namespace syncomm {

/// Reference community label per external node id.
struct GroundTruth {
  std::unordered_map<std::string, std::string> label_of;
};

/// Partition of the graph's nodes induced by the labels. Every graph node
/// must be labeled and every labeled id must exist in the graph.
Partition to_partition(const GroundTruth& truth, const NodeLabeling& labels);

/// 2·I(X;Y) / (H(X) + H(Y)). Both entropies zero gives 1; exactly one zero
/// gives 0.
double nmi(const Partition& x, const Partition& y);

/// Nodes whose reference label differs from the majority label of their
/// discovered community (smallest label on ties), ascending.
std::vector<NodeId> misassigned_nodes(const Partition& found, const Partition& truth);

/// (user, item) interactions, e.g. votes on stories.
class ActivityLog {
 public:
  void add(const std::string& user, const std::string& item);
  /// Sorted, unique item indices of `user`; empty when absent.
  std::span<const std::size_t> items(const std::string& user) const;
  bool contains(const std::string& user) const { return by_user_.count(user) != 0; }
  std::size_t item_count() const { return item_index_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> item_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_user_;
};

/// Categorical node attributes; an empty string marks a missing value.
struct AttributeTable {
  std::vector<std::string> features;
  std::unordered_map<std::string, std::vector<std::string>> rows;
};

struct CommunityScore {
  std::size_t community = 0;
  std::size_t size = 0;
  double value = 0.0;
};

struct QualityReport {
  std::vector<CommunityScore> communities;
  double mean = 0.0;           // unweighted over scored communities
  double weighted_mean = 0.0;  // weighted by community size
  std::size_t users_missing = 0;        // co-votes: members absent from the log
  std::size_t communities_excluded = 0; // purity: communities with no known value
};

/// Mean co-vote count over unordered member pairs, for communities with at
/// least `min_size` (≥ 2) members. Members absent from the log have no votes.
QualityReport covote_quality(const Partition& communities, const NodeLabeling& labels,
                             const ActivityLog& log, std::size_t min_size);

/// Share of the most common value of `feature` among members that have one.
QualityReport feature_purity(const Partition& communities, const NodeLabeling& labels,
                             const AttributeTable& attrs, const std::string& feature,
                             std::size_t min_size);

struct NmiPoint {
  double tau = 0.0;  // c·t
  double nmi = 0.0;
  bool saturated = false;
};

struct NmiSeries {
  OperatorKind kind = OperatorKind::kLaplacian;
  double timescale = 1.0;
  std::vector<NmiPoint> points;
};

struct TimeCourseOptions {
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  double coupling = 1.0;
  /// Grid values are multiples of each model's sync timescale.
  bool relative_to_timescale = false;
  /// Clusters per dendrogram cut; 0 uses the reference community count.
  std::size_t clusters = 0;
};

/// Scores an existing ensemble at t = τ·time_per_tau for each τ; every such
/// time must be on the ensemble grid.
NmiSeries score_time_course(const SimulationEnsemble& ens, const Partition& truth,
                            std::span<const double> tau_grid, double time_per_tau,
                            std::size_t clusters);

/// For each model: simulate on the τ grid, cut the average-link dendrogram,
/// and score the cut against `truth`. Saturated points (every pair fully
/// synchronized) are flagged.
std::vector<NmiSeries> nmi_time_course(const Graph& g, const Partition& truth,
                                       std::span<const OperatorKind> kinds,
                                       std::span<const double> tau_grid,
                                       const TimeCourseOptions& options);

}  // namespace syncomm
