#include "syncomm/clustering.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "syncomm/error.hpp"

namespace syncomm {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

std::size_t UnionFind::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t x, std::size_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (size_[x] < size_[y]) std::swap(x, y);
  parent_[y] = x;
  size_[x] += size_[y];
  return true;
}

namespace {

void check_mu(double mu) {
  if (!(mu > 0.0 && mu <= 2.0)) {
    throw Error(ErrorCode::kConfiguration, "mu must lie in (0, 2]");
  }
}

void check_table(const Graph& g, const EdgeSimilarityTable& sims) {
  if (sims.values.size() != g.edge_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "similarity table does not match the graph");
  }
}

Partition components_of(UnionFind& uf, std::size_t n) {
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = uf.find(i);
  return Partition(labels);
}

}  // namespace

Partition threshold_communities(const Graph& g, const EdgeSimilarityTable& sims, double mu) {
  std::vector<std::size_t> order(g.edge_count());
  std::iota(order.begin(), order.end(), 0);
  return threshold_communities(g, sims, mu, order);
}

Partition threshold_communities(const Graph& g, const EdgeSimilarityTable& sims, double mu,
                                std::span<const std::size_t> edge_order) {
  check_mu(mu);
  check_table(g, sims);
  const double cutoff = 1.0 - mu;
  UnionFind uf(g.node_count());
  auto edges = g.edges();
  for (std::size_t k : edge_order) {
    if (sims.values[k] >= cutoff) uf.unite(edges[k].u, edges[k].v);
  }
  return components_of(uf, g.node_count());
}

std::vector<std::vector<NodeId>> threshold_groups_within(const Graph& g,
                                                         const EdgeSimilarityTable& sims,
                                                         double mu,
                                                         std::span<const NodeId> members) {
  check_mu(mu);
  check_table(g, sims);
  const double cutoff = 1.0 - mu;
  std::vector<char> inside(g.node_count(), 0);
  for (NodeId v : members) inside[v] = 1;
  UnionFind uf(g.node_count());
  for (NodeId v : members) {
    auto nbrs = g.neighbors(v);
    auto eids = g.incident_edges(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (nbrs[k] > v && inside[nbrs[k]] && sims.values[eids[k]] >= cutoff) uf.unite(v, nbrs[k]);
    }
  }
  std::vector<NodeId> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<NodeId>> groups;
  std::vector<std::size_t> slot(g.node_count(), static_cast<std::size_t>(-1));
  for (NodeId v : sorted) {
    std::size_t root = uf.find(v);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(v);
  }
  return groups;
}

Partition Dendrogram::cut(std::size_t k) const {
  if (k == 0 || k > leaves_) {
    throw Error(ErrorCode::kConfiguration, "cut needs 1 <= k <= " + std::to_string(leaves_));
  }
  UnionFind uf(leaves_);
  std::vector<std::size_t> rep(leaves_ + merges_.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(leaves_), 0);
  const std::size_t applied = leaves_ - k;
  for (std::size_t s = 0; s < merges_.size(); ++s) {
    rep[leaves_ + s] = rep[merges_[s].left];
    if (s < applied) uf.unite(rep[merges_[s].left], rep[merges_[s].right]);
  }
  return components_of(uf, leaves_);
}

namespace {

std::string newick_leaf(const std::string& id) {
  if (id.find_first_of(" \t()[]':;,") == std::string::npos) return id;
  std::string quoted = "'";
  for (char c : id) {
    if (c == '\'') quoted += '\'';
    quoted += c;
  }
  return quoted + "'";
}

}  // namespace

std::string Dendrogram::to_newick(const NodeLabeling& labels) const {
  if (leaves_ == 0) return ";";
  std::vector<std::string> text(leaves_ + merges_.size());
  for (std::size_t i = 0; i < leaves_; ++i) text[i] = newick_leaf(labels.id(i));
  for (std::size_t s = 0; s < merges_.size(); ++s) {
    std::ostringstream out;
    out << '(' << text[merges_[s].left] << ',' << text[merges_[s].right] << ')'
        << std::setprecision(10) << merges_[s].similarity;
    text[leaves_ + s] = out.str();
    text[merges_[s].left].clear();
    text[merges_[s].right].clear();
  }
  // Clusters never merged (only when the tree is partial) join under a root.
  std::vector<std::string> roots;
  for (auto& t : text) {
    if (!t.empty()) roots.push_back(std::move(t));
  }
  if (roots.size() == 1) return roots.front() + ";";
  std::string joined = "(";
  for (std::size_t i = 0; i < roots.size(); ++i) joined += (i ? "," : "") + roots[i];
  return joined + ");";
}

Dendrogram average_linkage(std::span<const double> similarity, std::size_t n) {
  if (similarity.size() != n * n) {
    throw Error(ErrorCode::kDimensionMismatch, "similarity matrix must be n x n");
  }
  std::vector<double> s(similarity.begin(), similarity.end());
  std::vector<char> active(n, 1);
  std::vector<std::size_t> size(n, 1), cluster(n), best(n, 0);
  std::iota(cluster.begin(), cluster.end(), 0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return s[i * n + j]; };

  auto rescan = [&](std::size_t i) {
    std::size_t b = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      if (b == n || at(i, j) > at(i, b)) b = j;
    }
    best[i] = b;
  };
  for (std::size_t i = 0; i < n; ++i) rescan(i);

  std::vector<Dendrogram::Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = n, b = n;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || best[i] == n) continue;
      const double v = at(i, best[i]);
      const std::size_t lo = std::min(i, best[i]), hi = std::max(i, best[i]);
      if (a == n || v > value || (v == value && std::pair(lo, hi) < std::pair(a, b))) {
        value = v;
        a = lo;
        b = hi;
      }
    }
    merges.push_back({cluster[a], cluster[b], value, size[a] + size[b]});

    const double wa = static_cast<double>(size[a]), wb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double merged = (wa * at(a, k) + wb * at(b, k)) / (wa + wb);
      at(a, k) = merged;
      at(k, a) = merged;
    }
    active[b] = 0;
    size[a] += size[b];
    cluster[a] = n + step;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k]) continue;
      if (k == a || best[k] == a || best[k] == b) {
        rescan(k);
      } else if (at(k, a) > at(k, best[k]) || (at(k, a) == at(k, best[k]) && a < best[k])) {
        best[k] = a;
      }
    }
  }
  return Dendrogram(n, std::move(merges));
}

Dendrogram hierarchical_cluster(const SimulationEnsemble& ens, double t, std::size_t dense_cap) {
  std::vector<double> sim = pairwise_similarity(ens, t, dense_cap);
  return average_linkage(sim, ens.node_count());
}

std::vector<NodeId> sweep_order(const Graph& g, std::span<const double> theta,
                                bool normalize_by_degree) {
  const std::size_t n = g.node_count();
  if (theta.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "sweep vector size differs from node count");
  }
  std::vector<double> key(theta.begin(), theta.end());
  if (normalize_by_degree) {
    for (NodeId i = 0; i < n; ++i) {
      if (g.degree(i) == 0) {
        throw Error(ErrorCode::kDegenerateDegree, "degree-normalized sweep over an isolated node");
      }
      key[i] /= static_cast<double>(g.degree(i));
    }
  }
  if (n == 0 || std::all_of(key.begin(), key.end(), [&](double k) { return k == key[0]; })) {
    throw Error(ErrorCode::kDegenerateOrdering, "sweep vector is constant");
  }
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return key[a] > key[b]; });
  return order;
}

SweepCut sweep_cut(const Graph& g, std::span<const double> theta, bool normalize_by_degree) {
  std::vector<NodeId> order = sweep_order(g, theta, normalize_by_degree);
  const std::size_t n = g.node_count();
  const std::uint64_t total_volume = 2 * static_cast<std::uint64_t>(g.edge_count());

  std::vector<char> in_set(n, 0);
  std::uint64_t cut = 0, volume = 0;
  std::uint64_t best_num = 0, best_den = 0;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const NodeId u = order[i];
    std::uint64_t inside = 0;
    for (NodeId v : g.neighbors(u)) inside += in_set[v];
    in_set[u] = 1;
    cut = cut + g.degree(u) - 2 * inside;
    volume += g.degree(u);

    const std::size_t len = i + 1;
    const std::uint64_t den = normalize_by_degree
                                  ? std::min(volume, total_volume - volume)
                                  : static_cast<std::uint64_t>(std::min(len, n - len));
    if (den == 0) continue;
    if (best_len == 0 || cut * best_den < best_num * den) {
      best_num = cut;
      best_den = den;
      best_len = len;
    }
  }
  if (best_len == 0) {
    throw Error(ErrorCode::kDegenerateOrdering, "no prefix with a nonzero denominator");
  }
  SweepCut result;
  result.nodes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_len));
  result.conductance = static_cast<double>(best_num) / static_cast<double>(best_den);
  return result;
}

}  // namespace syncomm
