#include "syncomm/generator.hpp"

#include <string>

#include "syncomm/error.hpp"
#include "syncomm/rng.hpp"

namespace syncomm {

namespace {

double link_probability(double z, std::size_t candidates, const char* name) {
  if (!(z >= 0.0) || z > static_cast<double>(candidates)) {
    throw Error(ErrorCode::kInfeasible, std::string(name) + " = " + std::to_string(z) +
                                            " exceeds the " + std::to_string(candidates) +
                                            " available partners");
  }
  return candidates == 0 ? 0.0 : z / static_cast<double>(candidates);
}

}  // namespace

HierarchicalBenchmark generate_hierarchical_benchmark(const BenchmarkParams& p) {
  if (p.n == 0 || p.l1 == 0 || p.l2 == 0 || p.n % (p.l1 * p.l2) != 0) {
    throw Error(ErrorCode::kInfeasible, "n must be a positive multiple of l1*l2");
  }
  const std::size_t sub = p.n / (p.l1 * p.l2);
  const std::size_t comm = sub * p.l2;
  const double p1 = link_probability(p.z_in1, sub - 1, "z_in1");
  const double p2 = link_probability(p.z_in2, comm - sub, "z_in2");
  const double p3 = link_probability(p.z_out, p.n - comm, "z_out");

  std::uint64_t state = derive_seed(p.seed, 0);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < p.n; ++i) {
    for (NodeId j = i + 1; j < p.n; ++j) {
      const double prob = i / sub == j / sub ? p1 : i / comm == j / comm ? p2 : p3;
      if (uniform01(state) < prob) pairs.emplace_back(i, j);
    }
  }

  HierarchicalBenchmark out;
  out.graph = Graph::from_pairs(p.n, pairs, NodeLabeling::identity(p.n));
  std::vector<std::size_t> coarse(p.n), fine(p.n);
  for (NodeId i = 0; i < p.n; ++i) {
    coarse[i] = i / comm;
    fine[i] = i / sub;
    const std::string& id = out.graph.labels().id(i);
    out.community_truth.label_of[id] = "c" + std::to_string(coarse[i]);
    out.sub_community_truth.label_of[id] =
        "c" + std::to_string(coarse[i]) + "." + std::to_string(fine[i] % p.l2);
  }
  out.communities = Partition(coarse);
  out.sub_communities = Partition(fine);
  return out;
}

}  // namespace syncomm
