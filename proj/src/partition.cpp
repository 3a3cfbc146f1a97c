#include "syncomm/partition.hpp"

#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace syncomm {

namespace {
constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
}

Partition::Partition(std::span<const std::size_t> labels) : labels_(labels.size()) {
  std::unordered_map<std::size_t, std::size_t> remap;
  remap.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(labels[i], remap.size());
    labels_[i] = it->second;
  }
  community_count_ = remap.size();
}

Partition Partition::from_groups(std::size_t node_count,
                                 const std::vector<std::vector<NodeId>>& groups) {
  std::vector<std::size_t> labels(node_count, kUnset);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (NodeId node : groups[g]) {
      if (node >= node_count || labels[node] != kUnset) {
        throw std::invalid_argument("groups must partition the node set");
      }
      labels[node] = g;
    }
  }
  for (std::size_t label : labels) {
    if (label == kUnset) throw std::invalid_argument("groups leave a node unassigned");
  }
  return Partition(labels);
}

std::vector<std::size_t> Partition::sizes() const {
  std::vector<std::size_t> out(community_count_, 0);
  for (std::size_t label : labels_) ++out[label];
  return out;
}

std::vector<std::vector<NodeId>> Partition::groups() const {
  std::vector<std::vector<NodeId>> out(community_count_);
  for (NodeId i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(i);
  return out;
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.node_count() != node_count()) return false;
  std::vector<std::size_t> image(community_count_, kUnset);
  for (NodeId i = 0; i < labels_.size(); ++i) {
    std::size_t& target = image[labels_[i]];
    if (target == kUnset) {
      target = coarser.labels_[i];
    } else if (target != coarser.labels_[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace syncomm
