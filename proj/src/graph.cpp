#include "syncomm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "syncomm/error.hpp"

namespace syncomm {

NodeLabeling NodeLabeling::identity(std::size_t n) {
  NodeLabeling labels;
  for (std::size_t i = 0; i < n; ++i) labels.intern(std::to_string(i));
  return labels;
}

NodeId NodeLabeling::intern(std::string_view id) {
  auto [it, inserted] = index_.try_emplace(std::string(id), ids_.size());
  if (inserted) ids_.emplace_back(id);
  return it->second;
}

std::optional<NodeId> NodeLabeling::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Graph Graph::from_pairs(std::size_t node_count,
                        std::span<const std::pair<NodeId, NodeId>> pairs,
                        NodeLabeling labels, BuildReport* report) {
  BuildReport local;
  Graph g;
  g.edges_.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    if (a >= node_count || b >= node_count) {
      throw Error(ErrorCode::kDimensionMismatch, "edge endpoint out of range");
    }
    if (a == b) {
      ++local.self_loops_dropped;
      continue;
    }
    g.edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  auto last = std::unique(g.edges_.begin(), g.edges_.end());
  local.duplicates_dropped = static_cast<std::size_t>(g.edges_.end() - last);
  g.edges_.erase(last, g.edges_.end());

  g.degrees_.assign(node_count, 0);
  for (const Edge& e : g.edges_) {
    ++g.degrees_[e.u];
    ++g.degrees_[e.v];
  }
  g.offsets_.assign(node_count + 1, 0);
  for (std::size_t i = 0; i < node_count; ++i) {
    g.offsets_[i + 1] = g.offsets_[i] + g.degrees_[i];
  }
  g.neighbors_.resize(g.offsets_.back());
  g.edge_ids_.resize(g.offsets_.back());
  // Edges are sorted by (u, v): filling u's slots in edge order keeps each
  // list ascending for the v > u part, and v's slots receive the u < v part
  // in ascending u order before any of v's own larger neighbors.
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (std::size_t k = 0; k < g.edges_.size(); ++k) {
    const Edge& e = g.edges_[k];
    g.neighbors_[cursor[e.v]] = e.u;
    g.edge_ids_[cursor[e.v]++] = k;
  }
  for (std::size_t k = 0; k < g.edges_.size(); ++k) {
    const Edge& e = g.edges_[k];
    g.neighbors_[cursor[e.u]] = e.v;
    g.edge_ids_[cursor[e.u]++] = k;
  }
  g.max_degree_ = node_count == 0 ? 0 : *std::max_element(g.degrees_.begin(), g.degrees_.end());

  if (labels.size() == 0) labels = NodeLabeling::identity(node_count);
  if (labels.size() != node_count) {
    throw Error(ErrorCode::kDimensionMismatch, "labeling size differs from node count");
  }
  g.labels_ = std::move(labels);
  if (report != nullptr) *report = local;
  return g;
}

std::optional<std::size_t> Graph::edge_index(NodeId a, NodeId b) const {
  if (a >= node_count() || b >= node_count()) return std::nullopt;
  auto nbrs = neighbors(a);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b);
  if (it == nbrs.end() || *it != b) return std::nullopt;
  return incident_edges(a)[static_cast<std::size_t>(it - nbrs.begin())];
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  Subgraph sub;
  sub.to_parent.assign(nodes.begin(), nodes.end());
  std::sort(sub.to_parent.begin(), sub.to_parent.end());
  sub.to_parent.erase(std::unique(sub.to_parent.begin(), sub.to_parent.end()),
                      sub.to_parent.end());

  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(g.node_count(), kAbsent);
  NodeLabeling labels;
  for (std::size_t i = 0; i < sub.to_parent.size(); ++i) {
    local[sub.to_parent[i]] = i;
    labels.intern(g.labels().id(sub.to_parent[i]));
  }
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 0; i < sub.to_parent.size(); ++i) {
    for (NodeId nb : g.neighbors(sub.to_parent[i])) {
      if (local[nb] != kAbsent && local[nb] > i) pairs.emplace_back(i, local[nb]);
    }
  }
  sub.graph = Graph::from_pairs(sub.to_parent.size(), pairs, std::move(labels));
  return sub;
}

Partition connected_components(const Graph& g) {
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(g.node_count(), kUnseen);
  std::vector<NodeId> stack;
  std::size_t next = 0;
  for (NodeId root = 0; root < g.node_count(); ++root) {
    if (comp[root] != kUnseen) continue;
    comp[root] = next;
    stack.push_back(root);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] == kUnseen) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return Partition(comp);
}

Subgraph giant_component(const Graph& g) {
  if (g.empty()) throw Error(ErrorCode::kEmptyGraph, "giant component of an empty graph");
  auto groups = connected_components(g).groups();
  auto min_id = [&](const std::vector<NodeId>& members) {
    const std::string* best = &g.labels().id(members.front());
    for (NodeId m : members) {
      if (g.labels().id(m) < *best) best = &g.labels().id(m);
    }
    return *best;
  };
  std::size_t best = 0;
  for (std::size_t c = 1; c < groups.size(); ++c) {
    if (groups[c].size() > groups[best].size() ||
        (groups[c].size() == groups[best].size() && min_id(groups[c]) < min_id(groups[best]))) {
      best = c;
    }
  }
  return induced_subgraph(g, groups[best]);
}

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

bool is_skippable(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r\n\f\v");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

EdgeListLoad load_edge_list(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& node_list) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open edge list " + path.string());

  NodeLabeling labels;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    auto tokens = split_tokens(line);
    if (tokens.size() != 2) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                         ": expected two node ids, got " +
                                         std::to_string(tokens.size()) + " tokens");
    }
    NodeId a = labels.intern(tokens[0]);
    NodeId b = labels.intern(tokens[1]);
    pairs.emplace_back(a, b);
  }

  if (node_list) {
    std::ifstream nodes(*node_list);
    if (!nodes) throw Error(ErrorCode::kIo, "cannot open node list " + node_list->string());
    line_no = 0;
    while (std::getline(nodes, line)) {
      ++line_no;
      if (is_skippable(line)) continue;
      auto tokens = split_tokens(line);
      if (tokens.size() != 1) {
        throw Error(ErrorCode::kParse, node_list->string() + ":" + std::to_string(line_no) +
                                           ": expected one node id");
      }
      labels.intern(tokens[0]);
    }
  }

  if (labels.size() == 0) {
    throw Error(ErrorCode::kEmptyGraph, "no nodes in " + path.string());
  }
  EdgeListLoad out;
  std::size_t n = labels.size();
  out.graph = Graph::from_pairs(n, pairs, std::move(labels), &out.report);
  return out;
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const Edge& e : g.edges()) {
    out << g.labels().id(e.u) << ' ' << g.labels().id(e.v) << '\n';
  }
}

}  // namespace syncomm
