#include "syncomm/multiscale.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

#include "syncomm/clustering.hpp"
#include "syncomm/error.hpp"

namespace syncomm {

OnionDecomposition onion_decompose(const Graph& g, const EdgeSimilarityTable& sims,
                                   std::span<const double> mu_schedule, const std::string& model) {
  for (std::size_t i = 1; i < mu_schedule.size(); ++i) {
    if (!(mu_schedule[i] < mu_schedule[i - 1])) {
      throw Error(ErrorCode::kConfiguration, "mu schedule must be strictly descending");
    }
  }
  OnionDecomposition dec;
  dec.time = sims.time;
  dec.model = model;

  std::vector<NodeId> core(g.node_count());
  std::iota(core.begin(), core.end(), 0);
  for (double mu : mu_schedule) {
    auto groups = threshold_groups_within(g, sims, mu, core);
    // Groups are ordered by smallest member, so the first largest one wins ties.
    auto largest = std::max_element(groups.begin(), groups.end(),
                                    [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (largest == groups.end() || largest->size() < kMinWhiskerSize) {
      dec.stopped_early = true;
      dec.note = "core vanished at mu=" + std::to_string(mu) + " (largest community has " +
                 std::to_string(largest == groups.end() ? 0 : largest->size()) + " nodes)";
      break;
    }
    OnionLayer layer;
    layer.mu = mu;
    for (auto it = groups.begin(); it != groups.end(); ++it) {
      if (it == largest) continue;
      if (it->size() >= kMinWhiskerSize) {
        layer.whiskers.push_back(*it);
      } else {
        ++layer.fragment_groups;
        layer.fragment_nodes += it->size();
      }
    }
    layer.core = std::move(*largest);
    core = layer.core;
    dec.layers.push_back(std::move(layer));
  }
  return dec;
}

SizeHistogram whisker_size_distribution(const OnionDecomposition& dec, std::size_t layer) {
  if (layer >= dec.layers.size()) {
    throw Error(ErrorCode::kConfiguration, "layer " + std::to_string(layer) + " does not exist");
  }
  SizeHistogram hist;
  for (const auto& w : dec.layers[layer].whiskers) hist.sizes.push_back(w.size());
  std::sort(hist.sizes.begin(), hist.sizes.end(), std::greater<>());
  for (std::size_t size : hist.sizes) {
    std::size_t bin = 0;
    while ((kMinWhiskerSize << (bin + 1)) <= size) ++bin;
    while (hist.bins.size() <= bin) {
      std::size_t lower = kMinWhiskerSize << hist.bins.size();
      hist.bins.push_back({lower, 2 * lower, 0});
    }
    ++hist.bins[bin].count;
  }
  return hist;
}

std::vector<CoreOverlap> core_overlap(const OnionDecomposition& a, const OnionDecomposition& b) {
  std::vector<CoreOverlap> out;
  if (b.layers.empty()) return out;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const auto& core_a = a.layers[i].core;
    std::size_t pick = 0;
    std::size_t best_gap = static_cast<std::size_t>(-1);
    for (std::size_t j = 0; j < b.layers.size(); ++j) {
      const std::size_t sa = core_a.size(), sb = b.layers[j].core.size();
      const std::size_t gap = sa > sb ? sa - sb : sb - sa;
      if (gap < best_gap) {
        best_gap = gap;
        pick = j;
      }
    }
    const auto& core_b = b.layers[pick].core;
    std::vector<NodeId> common;
    std::set_intersection(core_a.begin(), core_a.end(), core_b.begin(), core_b.end(),
                          std::back_inserter(common));
    const std::size_t denom = std::min(core_a.size(), core_b.size());
    out.push_back({i, pick, denom == 0 ? 0.0 : static_cast<double>(common.size()) /
                                                   static_cast<double>(denom)});
  }
  return out;
}

std::vector<double> suggest_mu_schedule(const Graph& g, const EdgeSimilarityTable& sims,
                                        std::span<const double> core_fractions) {
  static constexpr double kDefaultFractions[] = {0.9, 0.75, 0.6, 0.45, 0.3, 0.15};
  if (core_fractions.empty()) core_fractions = kDefaultFractions;
  const double n = static_cast<double>(g.node_count());
  auto core_fraction = [&](double mu) {
    auto sizes = threshold_communities(g, sims, mu).sizes();
    return static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) / n;
  };
  std::vector<double> schedule;
  for (double target : core_fractions) {
    // Core fraction is non-decreasing in μ; find the smallest μ reaching target.
    double lo = 0.0, hi = 2.0;
    if (core_fraction(hi) < target) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= 0.0) break;
      if (core_fraction(mid) >= target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    if (schedule.empty() || hi < schedule.back()) schedule.push_back(hi);
  }
  return schedule;
}

}  // namespace syncomm
