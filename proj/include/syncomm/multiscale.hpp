#pragma once

#include <span>
#include <string>
#include <vector>

#include "syncomm/graph.hpp"
#include "syncomm/similarity.hpp"

namespace syncomm {

inline constexpr std::size_t kMinWhiskerSize = 3;

struct OnionLayer {
  double mu = 0.0;
  std::vector<NodeId> core;                  // ascending
  std::vector<std::vector<NodeId>> whiskers; // communities of size ≥ 3 other than the core
  std::size_t fragment_groups = 0;           // leftover communities of size 1 or 2
  std::size_t fragment_nodes = 0;
};

/// Successive cores peeled under a descending μ schedule.
///
/// Layer k thresholds the subgraph induced by core k−1 (the whole graph for
/// k = 0); its largest community (smallest member id on ties) is core k.
struct OnionDecomposition {
  std::vector<OnionLayer> layers;
  double time = 0.0;
  std::string model;
  bool stopped_early = false;
  std::string note;
};

OnionDecomposition onion_decompose(const Graph& g, const EdgeSimilarityTable& sims,
                                   std::span<const double> mu_schedule,
                                   const std::string& model = {});

struct SizeHistogram {
  struct Bin {
    std::size_t lower = 0;  // inclusive
    std::size_t upper = 0;  // exclusive
    std::size_t count = 0;
  };
  std::vector<Bin> bins;           // edges 3·2^k, through the largest occupied bin
  std::vector<std::size_t> sizes;  // raw whisker sizes, descending
};

SizeHistogram whisker_size_distribution(const OnionDecomposition& dec, std::size_t layer);

struct CoreOverlap {
  std::size_t layer_a = 0;
  std::size_t layer_b = 0;
  double overlap = 0.0;  // |A ∩ B| / min(|A|, |B|)
};

/// Pairs each layer of `a` with the layer of `b` whose core size is closest
/// (earliest on ties).
std::vector<CoreOverlap> core_overlap(const OnionDecomposition& a, const OnionDecomposition& b);

/// One μ per target core fraction, found by bisection on the whole-graph
/// threshold partition; returned strictly descending.
std::vector<double> suggest_mu_schedule(const Graph& g, const EdgeSimilarityTable& sims,
                                        std::span<const double> core_fractions = {});

}  // namespace syncomm
