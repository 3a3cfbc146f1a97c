#pragma once

#include <optional>
#include <vector>

#include "syncomm/dynamics.hpp"
#include "syncomm/graph.hpp"

namespace syncomm {

/// Ensemble-averaged synchronization similarity of every edge at one time.
///
/// For an edge (i, j) with i < j and steady-state shape e,
///   sim = (1/K) Σ_runs cos(θ_i − (e_i/e_j)·θ_j).
/// Values line up with `Graph::edges()`.
struct EdgeSimilarityTable {
  std::vector<double> values;
  double time = 0.0;
  std::size_t runs = 0;

  double operator[](std::size_t edge) const { return values[edge]; }
  double min() const;
};

/// Similarity of nodes i < j at grid index `time_index`.
double pair_similarity(const SimulationEnsemble& ens, std::size_t time_index, NodeId i, NodeId j);

/// Parallel over edges; bitwise equal to `edge_similarity_serial`.
EdgeSimilarityTable edge_similarity(const SimulationEnsemble& ens, double t, const Graph& g);
EdgeSimilarityTable edge_similarity_serial(const SimulationEnsemble& ens, double t,
                                           const Graph& g);

/// Dense n × n row-major similarity matrix with unit diagonal; entry (i, j)
/// and (j, i) both hold the i < j orientation. Parallel over rows.
std::vector<double> pairwise_similarity(const SimulationEnsemble& ens, double t,
                                        std::size_t dense_cap = 4096);
std::vector<double> pairwise_similarity_serial(const SimulationEnsemble& ens, double t,
                                               std::size_t dense_cap = 4096);

/// First grid time at which every pair of nodes sharing a connected component
/// has similarity ≥ 1 − tol. Graphs above the dense cap check edges only.
std::optional<double> equilibrium_time(const SimulationEnsemble& ens, const Graph& g,
                                       double tol = 1e-9, std::size_t dense_cap = 4096);

}  // namespace syncomm
