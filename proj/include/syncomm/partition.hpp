#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace syncomm {

using NodeId = std::size_t;

/// Flat assignment of nodes to communities.
///
/// Community ids are canonical: they are dense and numbered in order of the
/// smallest node they contain, so two partitions compare equal exactly when
/// they group the nodes identically.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::span<const std::size_t> labels);

  static Partition from_groups(std::size_t node_count,
                               const std::vector<std::vector<NodeId>>& groups);

  std::size_t node_count() const { return labels_.size(); }
  std::size_t community_count() const { return community_count_; }
  std::size_t community_of(NodeId node) const { return labels_[node]; }
  std::span<const std::size_t> labels() const { return labels_; }

  std::vector<std::size_t> sizes() const;
  /// Members of each community, ascending, indexed by community id.
  std::vector<std::vector<NodeId>> groups() const;

  /// True when every community of this partition lies inside one community
  /// of `coarser`.
  bool refines(const Partition& coarser) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::size_t> labels_;
  std::size_t community_count_ = 0;
};

}  // namespace syncomm
