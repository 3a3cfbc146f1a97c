// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "syncomm/dynamics.hpp"
#include "syncomm/operators.hpp"
#include "syncomm/similarity.hpp"
#include "syncomm/spectral.hpp"

using namespace syncomm;

namespace {

Graph random_graph(std::size_t n, double mean_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  const auto m = static_cast<std::size_t>(mean_degree * static_cast<double>(n) / 2);
  for (std::size_t i = 1; i < n; ++i) pairs.emplace_back(i - 1, i);  // keeps it connected
  while (pairs.size() < m) pairs.emplace_back(pick(rng), pick(rng));
  return Graph::from_pairs(n, pairs, NodeLabeling::identity(n));
}

const Graph& graph_of(std::size_t n) {
  static std::map<std::size_t, Graph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, random_graph(n, 10.0, n)).first;
  return it->second;
}

void apply(benchmark::State& state, bool parallel) {
  const Graph& g = graph_of(static_cast<std::size_t>(state.range(0)));
  InteractionOperator op = build_operator(g, OperatorKind::kSymNorm);
  std::vector<double> x = initial_phases(1, 0, g.node_count()), y(g.node_count());
  for (auto _ : state) {
    if (parallel) {
      op.apply(x, y);
    } else {
      op.apply_serial(x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.edge_count()));
}

SimulationEnsemble ensemble_of(const Graph& g) {
  SimulationConfig cfg;
  cfg.runs = 20;
  cfg.times = {0.0, 0.5};
  cfg.method = Integrator::kRungeKutta4;
  return simulate(make_operator(g, OperatorKind::kLaplacian), cfg);
}

void edge_sims(benchmark::State& state, bool parallel) {
  const Graph& g = graph_of(static_cast<std::size_t>(state.range(0)));
  SimulationEnsemble ens = ensemble_of(g);
  for (auto _ : state) {
    auto t = parallel ? edge_similarity(ens, 0.5, g) : edge_similarity_serial(ens, 0.5, g);
    benchmark::DoNotOptimize(t.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.edge_count()));
}

void pairwise_sims(benchmark::State& state, bool parallel) {
  const Graph& g = graph_of(static_cast<std::size_t>(state.range(0)));
  SimulationEnsemble ens = ensemble_of(g);
  for (auto _ : state) {
    auto s = parallel ? pairwise_similarity(ens, 0.5) : pairwise_similarity_serial(ens, 0.5);
    benchmark::DoNotOptimize(s.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(apply, serial, false)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(apply, parallel, true)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(edge_sims, serial, false)->Arg(20000);
BENCHMARK_CAPTURE(edge_sims, parallel, true)->Arg(20000);
BENCHMARK_CAPTURE(pairwise_sims, serial, false)->Arg(800);
BENCHMARK_CAPTURE(pairwise_sims, parallel, true)->Arg(800);

BENCHMARK_MAIN();
