#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library beyond reading Graph structure.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "syncomm/graph.hpp"
#include "syncomm/operators.hpp"

namespace oracle {

using syncomm::Graph;
using syncomm::NodeId;
using syncomm::OperatorKind;

inline Graph make_graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  return Graph::from_pairs(n, pairs, syncomm::NodeLabeling::identity(n));
}

/// G(n, p) with a test-side generator.
inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) pairs.emplace_back(i, j);
  return make_graph(n, pairs);
}

/// Random spanning tree plus G(n, p) extras: always connected.
inline Graph random_connected_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 1; i < n; ++i) {
    std::uniform_int_distribution<NodeId> parent(0, i - 1);
    pairs.emplace_back(parent(rng), i);
  }
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) pairs.emplace_back(i, j);
  return make_graph(n, pairs);
}

/// Two K_m joined through a path of `path` extra nodes (networkx layout:
/// bell 0..m-1, path m..m+path-1, bell m+path..2m+path-1).
inline Graph barbell(std::size_t m, std::size_t path) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  const std::size_t n = 2 * m + path;
  for (NodeId i = 0; i < m; ++i)
    for (NodeId j = i + 1; j < m; ++j) {
      pairs.emplace_back(i, j);
      pairs.emplace_back(m + path + i, m + path + j);
    }
  NodeId prev = m - 1;
  for (NodeId k = 0; k < path; ++k) {
    pairs.emplace_back(prev, m + k);
    prev = m + k;
  }
  pairs.emplace_back(prev, m + path);
  return make_graph(n, pairs);
}

inline Eigen::MatrixXd adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = 1.0;
    a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = 1.0;
  }
  return a;
}

/// Dense operator straight from the matrix definitions.
inline Eigen::MatrixXd dense_operator(const Graph& g, OperatorKind kind, double alpha = 0.0) {
  const Eigen::MatrixXd a = adjacency(g);
  const auto n = a.rows();
  const Eigen::VectorXd d = a.rowwise().sum();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  switch (kind) {
    case OperatorKind::kLaplacian:
      return Eigen::MatrixXd(d.asDiagonal()) - a;
    case OperatorKind::kRandomWalkNorm:
      return eye - a * Eigen::MatrixXd(d.cwiseInverse().asDiagonal());
    case OperatorKind::kSymNorm: {
      const Eigen::MatrixXd s = d.cwiseSqrt().cwiseInverse().asDiagonal();
      return eye - s * a * s;
    }
    case OperatorKind::kReplicator:
      return alpha * eye - a;
    case OperatorKind::kScaledAdjacency:
      return eye - a / alpha;
    case OperatorKind::kModularity:
      return d * d.transpose() / d.sum() - a;
  }
  return {};
}

inline double dense_lambda_max(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency(g));
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

inline Eigen::VectorXd dense_dominant_vector(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency(g));
  Eigen::VectorXd v = es.eigenvectors().col(es.eigenvalues().size() - 1);
  if (v.sum() < 0) v = -v;
  return v;
}

/// Eigenvalues ascending; the non-symmetric kind is handled by a general solver.
inline std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  if (m.isApprox(m.transpose(), 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i).real());
    std::sort(out.begin(), out.end());
  }
  return out;
}

/// θ(t) = exp(−c·t·M)·θ₀ by Padé scaling-and-squaring.
inline std::vector<double> expm_apply(const Eigen::MatrixXd& m, double ct, const std::vector<double>& theta0) {
  const Eigen::MatrixXd prop = (-ct * m).exp();
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(theta0.data(), static_cast<Eigen::Index>(theta0.size()));
  Eigen::VectorXd y = prop * x;
  return {y.data(), y.data() + y.size()};
}

/// Component label per node by breadth-first search.
inline std::vector<std::size_t> bfs_components(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<std::size_t> label(n, n);
  std::size_t next = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    std::queue<NodeId> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (NodeId v : adj[u])
        if (label[v] == n) {
          label[v] = next;
          q.push(v);
        }
    }
    ++next;
  }
  return label;
}

inline std::size_t bfs_component_count(const Graph& g) {
  auto label = bfs_components(g);
  return label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
}

/// True when label vectors group nodes identically.
inline bool same_grouping(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return false;
  std::map<std::size_t, std::size_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, inserted_x] = ab.emplace(a[i], b[i]);
    auto [y, inserted_y] = ba.emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

/// NMI from the textbook double sum over the contingency table.
inline double nmi(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
  const double n = static_cast<double>(x.size());
  std::map<std::size_t, double> px, py;
  std::map<std::pair<std::size_t, std::size_t>, double> pxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[x[i]] += 1.0 / n;
    py[y[i]] += 1.0 / n;
    pxy[{x[i], y[i]}] += 1.0 / n;
  }
  double hx = 0, hy = 0, mi = 0;
  for (auto& [k, p] : px) hx -= p * std::log(p);
  for (auto& [k, p] : py) hy -= p * std::log(p);
  for (auto& [k, p] : pxy) mi += p * std::log(p / (px[k.first] * py[k.second]));
  // Probabilities are accumulated in steps of 1/n, so a single class may sum to 1 − ε.
  const bool zx = std::abs(hx) < 1e-12, zy = std::abs(hy) < 1e-12;
  if (zx && zy) return 1.0;
  if (zx || zy) return 0.0;
  return 2 * mi / (hx + hy);
}

/// Mean over member pairs of the size of the shared item set.
inline double covotes(const std::vector<std::set<std::string>>& member_items) {
  double total = 0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < member_items.size(); ++a)
    for (std::size_t b = a + 1; b < member_items.size(); ++b) {
      std::vector<std::string> common;
      std::set_intersection(member_items[a].begin(), member_items[a].end(), member_items[b].begin(),
                            member_items[b].end(), std::back_inserter(common));
      total += static_cast<double>(common.size());
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

/// Largest same-value share among non-missing values; negative when all missing.
inline double purity(const std::vector<std::string>& values) {
  std::size_t best = 0, known = 0;
  for (const auto& v : values) {
    if (v.empty()) continue;
    ++known;
    best = std::max<std::size_t>(best, static_cast<std::size_t>(std::count(values.begin(), values.end(), v)));
  }
  return known == 0 ? -1.0 : static_cast<double>(best) / static_cast<double>(known);
}

/// Edges crossing the boundary of `in`, counted directly.
inline std::size_t boundary(const Graph& g, const std::vector<char>& in) {
  std::size_t cut = 0;
  for (const auto& e : g.edges()) cut += in[e.u] != in[e.v];
  return cut;
}

/// Minimum prefix score over every prefix of `order`, recomputed from scratch.
/// Returns (numerator, denominator, prefix length) of the earliest minimum.
struct PrefixScore {
  std::size_t num = 0, den = 0, length = 0;
};

inline PrefixScore brute_prefix_minimum(const Graph& g, const std::vector<NodeId>& order, bool by_volume) {
  const std::size_t n = g.node_count();
  std::size_t total_volume = 0;
  for (NodeId v = 0; v < n; ++v) total_volume += g.degree(v);
  PrefixScore best;
  for (std::size_t len = 1; len < n; ++len) {
    std::vector<char> in(n, 0);
    std::size_t vol = 0;
    for (std::size_t k = 0; k < len; ++k) {
      in[order[k]] = 1;
      vol += g.degree(order[k]);
    }
    const std::size_t num = boundary(g, in);
    const std::size_t den = by_volume ? std::min(vol, total_volume - vol) : std::min(len, n - len);
    if (den == 0) continue;
    if (best.length == 0 || static_cast<double>(num) / static_cast<double>(den) <
                                static_cast<double>(best.num) / static_cast<double>(best.den)) {
      best = {num, den, len};
    }
  }
  return best;
}

}  // namespace oracle
