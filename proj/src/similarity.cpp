#include "syncomm/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "syncomm/error.hpp"

namespace syncomm {

namespace {

constexpr std::size_t kParallelEdges = 2048;

std::size_t require_time(const SimulationEnsemble& ens, double t) {
  auto idx = ens.time_index(t);
  if (!idx) {
    throw Error(ErrorCode::kGrid, "time " + std::to_string(t) + " is not on the simulated grid");
  }
  return *idx;
}

void require_equilibrium(const SimulationEnsemble& ens) {
  const auto& e = ens.equilibrium_direction;
  double scale = 0.0;
  for (double x : e) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(std::abs(e[i]) > 1e-14 * scale)) {
      throw Error(ErrorCode::kDegenerateEquilibrium,
                  "steady state is zero at node " + std::to_string(i) +
                      "; similarity ratios are undefined (is alpha above lambda_max?)");
    }
  }
}

void require_graph(const SimulationEnsemble& ens, const Graph& g) {
  if (g.node_count() != ens.node_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "graph and ensemble sizes differ");
  }
}

}  // namespace

double EdgeSimilarityTable::min() const {
  return values.empty() ? 1.0 : *std::min_element(values.begin(), values.end());
}

double pair_similarity(const SimulationEnsemble& ens, std::size_t time_index, NodeId i,
                       NodeId j) {
  const double ratio = ens.equilibrium_direction[i] / ens.equilibrium_direction[j];
  double s = 0.0;
  for (const Trajectory& run : ens.runs) {
    auto theta = run.at(time_index);
    s += std::cos(theta[i] - ratio * theta[j]);
  }
  return s / static_cast<double>(ens.runs.size());
}

EdgeSimilarityTable edge_similarity(const SimulationEnsemble& ens, double t, const Graph& g) {
  require_graph(ens, g);
  const std::size_t ti = require_time(ens, t);
  require_equilibrium(ens);
  EdgeSimilarityTable table;
  table.time = ens.times()[ti];
  table.runs = ens.runs.size();
  table.values.resize(g.edge_count());
  auto edges = g.edges();
  const auto m = static_cast<std::ptrdiff_t>(edges.size());
#pragma omp parallel for schedule(static) if (edges.size() >= kParallelEdges)
  for (std::ptrdiff_t k = 0; k < m; ++k) {
    const Edge& e = edges[static_cast<std::size_t>(k)];
    table.values[static_cast<std::size_t>(k)] = pair_similarity(ens, ti, e.u, e.v);
  }
  return table;
}

EdgeSimilarityTable edge_similarity_serial(const SimulationEnsemble& ens, double t,
                                           const Graph& g) {
  require_graph(ens, g);
  const std::size_t ti = require_time(ens, t);
  require_equilibrium(ens);
  EdgeSimilarityTable table;
  table.time = ens.times()[ti];
  table.runs = ens.runs.size();
  table.values.reserve(g.edge_count());
  for (const Edge& e : g.edges()) table.values.push_back(pair_similarity(ens, ti, e.u, e.v));
  return table;
}

namespace {

std::vector<double> pairwise_impl(const SimulationEnsemble& ens, double t, std::size_t dense_cap,
                                  bool parallel) {
  const std::size_t n = ens.node_count();
  if (n > dense_cap) {
    throw Error(ErrorCode::kSizeCap, "pairwise similarity of " + std::to_string(n) +
                                         " nodes exceeds cap " + std::to_string(dense_cap));
  }
  const std::size_t ti = require_time(ens, t);
  require_equilibrium(ens);
  std::vector<double> sim(n * n, 1.0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = pair_similarity(ens, ti, i, j);
      sim[i * n + j] = s;
      sim[j * n + i] = s;
    }
  }
  return sim;
}

}  // namespace

std::vector<double> pairwise_similarity(const SimulationEnsemble& ens, double t,
                                        std::size_t dense_cap) {
  return pairwise_impl(ens, t, dense_cap, true);
}

std::vector<double> pairwise_similarity_serial(const SimulationEnsemble& ens, double t,
                                               std::size_t dense_cap) {
  return pairwise_impl(ens, t, dense_cap, false);
}

std::optional<double> equilibrium_time(const SimulationEnsemble& ens, const Graph& g, double tol,
                                       std::size_t dense_cap) {
  require_graph(ens, g);
  const std::size_t n = g.node_count();
  Partition comps = connected_components(g);
  for (double t : ens.times()) {
    bool synced = true;
    if (n <= dense_cap) {
      std::vector<double> sim = pairwise_similarity(ens, t, dense_cap);
      for (std::size_t i = 0; i < n && synced; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (comps.community_of(i) == comps.community_of(j) && sim[i * n + j] < 1.0 - tol) {
            synced = false;
            break;
          }
        }
      }
    } else {
      synced = edge_similarity(ens, t, g).min() >= 1.0 - tol;
    }
    if (synced) return t;
  }
  return std::nullopt;
}

}  // namespace syncomm
