#pragma once

#include <cstdint>

#include "syncomm/evaluation.hpp"
#include "syncomm/graph.hpp"
#include "syncomm/partition.hpp"

namespace syncomm {

struct BenchmarkParams {
  std::size_t n = 256;
  std::size_t l1 = 4;  // communities
  std::size_t l2 = 4;  // sub-communities per community
  double z_in1 = 13;   // expected links inside the own sub-community
  double z_in2 = 4;    // expected links to the rest of the own community
  double z_out = 1;    // expected links outside the own community
  std::uint64_t seed = 0;
};

struct HierarchicalBenchmark {
  Graph graph;
  Partition communities;      // l1 groups
  Partition sub_communities;  // l1·l2 groups
  GroundTruth community_truth;
  GroundTruth sub_community_truth;
};

/// Two-level planted partition. Every node pair is linked independently with
/// the probability that makes the expected degree into each block match the
/// z targets. Nodes are "0".."n-1"; node i sits in sub-community i / (n/(l1·l2)).
HierarchicalBenchmark generate_hierarchical_benchmark(const BenchmarkParams& params);

}  // namespace syncomm
