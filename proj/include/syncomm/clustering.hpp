#pragma once

#include <span>
#include <string>
#include <vector>

#include "syncomm/dynamics.hpp"
#include "syncomm/graph.hpp"
#include "syncomm/partition.hpp"
#include "syncomm/similarity.hpp"

namespace syncomm {

/// Disjoint-set forest with union by size and path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  /// Returns false when x and y were already joined.
  bool unite(std::size_t x, std::size_t y);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// Connected components of the subgraph of edges with similarity ≥ 1 − μ.
/// Requires 0 < μ ≤ 2. The result does not depend on edge order.
Partition threshold_communities(const Graph& g, const EdgeSimilarityTable& sims, double mu);

/// Same, visiting edges in `edge_order` (a permutation of edge indices).
Partition threshold_communities(const Graph& g, const EdgeSimilarityTable& sims, double mu,
                                std::span<const std::size_t> edge_order);

/// Threshold communities of the subgraph induced by `members`, as ascending
/// member lists ordered by their smallest node.
std::vector<std::vector<NodeId>> threshold_groups_within(const Graph& g,
                                                         const EdgeSimilarityTable& sims,
                                                         double mu,
                                                         std::span<const NodeId> members);

/// Binary merge tree. Leaves are 0..n−1; merge k creates cluster n + k.
class Dendrogram {
 public:
  struct Merge {
    std::size_t left = 0;   // cluster containing the smaller node id
    std::size_t right = 0;
    double similarity = 0.0;
    std::size_t size = 0;
  };

  Dendrogram() = default;
  Dendrogram(std::size_t leaves, std::vector<Merge> merges)
      : leaves_(leaves), merges_(std::move(merges)) {}

  std::size_t leaf_count() const { return leaves_; }
  const std::vector<Merge>& merges() const { return merges_; }

  /// Flat partition with k clusters (1 ≤ k ≤ n).
  Partition cut(std::size_t k) const;

  /// Newick tree; internal nodes are labeled with their merge similarity.
  std::string to_newick(const NodeLabeling& labels) const;

 private:
  std::size_t leaves_ = 0;
  std::vector<Merge> merges_;
};

/// Average-link agglomeration of a dense symmetric similarity matrix
/// (row-major n × n). Ties go to the pair of clusters with the
/// lexicographically smallest (min node id, min node id).
Dendrogram average_linkage(std::span<const double> similarity, std::size_t n);

/// Average-link dendrogram over all-pairs synchronization similarity.
Dendrogram hierarchical_cluster(const SimulationEnsemble& ens, double t,
                                std::size_t dense_cap = 4096);

struct SweepCut {
  std::vector<NodeId> nodes;  // the winning prefix, in sweep order
  double conductance = 0.0;
};

/// Best prefix of the nodes sorted by θ (descending; by θ/d when
/// `normalize_by_degree`). Unnormalized prefixes score E(S,S̄)/min(|S|,|S̄|),
/// normalized ones E(S,S̄)/min(vol S, vol S̄). Earliest prefix wins ties.
SweepCut sweep_cut(const Graph& g, std::span<const double> theta, bool normalize_by_degree);

/// Node order used by `sweep_cut`: descending key, ascending index on ties.
std::vector<NodeId> sweep_order(const Graph& g, std::span<const double> theta,
                                bool normalize_by_degree);

}  // namespace syncomm
