#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "syncomm/partition.hpp"

namespace syncomm {

/// Bidirectional map between external node ids and dense indices.
class NodeLabeling {
 public:
  NodeLabeling() = default;

  /// Labels "0", "1", ..., "n-1".
  static NodeLabeling identity(std::size_t n);

  /// Index of `id`, registering it at the next dense index when unseen.
  NodeId intern(std::string_view id);
  std::optional<NodeId> find(std::string_view id) const;
  const std::string& id(NodeId node) const { return ids_[node]; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeId> index_;
};

/// Undirected edge with `u < v`.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct BuildReport {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

/// Immutable undirected, unweighted graph in compressed sparse row form.
///
/// Edges are stored once with `u < v` in lexicographic order; each adjacency
/// entry also records the index of its edge so per-edge tables can be looked
/// up from either endpoint. Neighbor lists are ascending.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary pair list. Pairs are symmetrized; self-loops
  /// and duplicates are dropped and counted in `report`.
  static Graph from_pairs(std::size_t node_count,
                          std::span<const std::pair<NodeId, NodeId>> pairs,
                          NodeLabeling labels = {}, BuildReport* report = nullptr);

  std::size_t node_count() const { return degrees_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return degrees_.empty(); }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const NodeId> neighbors(NodeId node) const {
    return {neighbors_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  /// Edge index for each entry of `neighbors(node)`.
  std::span<const std::size_t> incident_edges(NodeId node) const {
    return {edge_ids_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  std::size_t degree(NodeId node) const { return degrees_[node]; }
  std::span<const std::size_t> degrees() const { return degrees_; }
  std::size_t max_degree() const { return max_degree_; }

  std::optional<std::size_t> edge_index(NodeId a, NodeId b) const;
  bool has_edge(NodeId a, NodeId b) const { return edge_index(a, b).has_value(); }

  const NodeLabeling& labels() const { return labels_; }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<std::size_t> edge_ids_;
  std::vector<std::size_t> degrees_;
  std::vector<Edge> edges_;
  std::size_t max_degree_ = 0;
  NodeLabeling labels_;
};

/// Induced subgraph together with the map back to parent indices.
struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_parent;
};

/// Induced subgraph on `nodes` (any order; the subgraph keeps ascending
/// parent order). External ids are carried over.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// Components numbered by their smallest node.
Partition connected_components(const Graph& g);

/// Largest connected component; ties go to the component whose smallest
/// external id sorts first.
Subgraph giant_component(const Graph& g);

struct EdgeListLoad {
  Graph graph;
  BuildReport report;
};

/// Reads a whitespace-separated edge list. Lines starting with `#` and blank
/// lines are skipped. Node ids are arbitrary tokens indexed in order of first
/// appearance; `node_list`, when given, adds isolated nodes (one id per line)
/// after those seen in the edge file.
EdgeListLoad load_edge_list(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& node_list = {});

void write_edge_list(const Graph& g, const std::filesystem::path& path);

}  // namespace syncomm
