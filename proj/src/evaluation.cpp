#include "syncomm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "syncomm/clustering.hpp"
#include "syncomm/dynamics.hpp"
#include "syncomm/error.hpp"
#include "syncomm/similarity.hpp"
#include "syncomm/spectral.hpp"

namespace syncomm {

Partition to_partition(const GroundTruth& truth, const NodeLabeling& labels) {
  for (const auto& [id, label] : truth.label_of) {
    if (!labels.find(id)) {
      throw Error(ErrorCode::kNodeSetMismatch, "ground truth names unknown node '" + id + "'");
    }
  }
  std::map<std::string, std::size_t> ids;
  std::vector<std::size_t> assignment(labels.size());
  for (NodeId i = 0; i < labels.size(); ++i) {
    auto it = truth.label_of.find(labels.id(i));
    if (it == truth.label_of.end()) {
      throw Error(ErrorCode::kNodeSetMismatch, "node '" + labels.id(i) + "' has no label");
    }
    assignment[i] = ids.try_emplace(it->second, ids.size()).first->second;
  }
  return Partition(assignment);
}

double nmi(const Partition& x, const Partition& y) {
  if (x.node_count() != y.node_count()) {
    throw Error(ErrorCode::kNodeSetMismatch, "partitions cover different node sets");
  }
  const std::size_t n = x.node_count();
  if (n == 0) return 1.0;
  const auto nx = x.sizes(), ny = y.sizes();
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
  for (NodeId i = 0; i < n; ++i) ++joint[{x.community_of(i), y.community_of(i)}];

  const double total = static_cast<double>(n);
  auto entropy = [&](const std::vector<std::size_t>& counts) {
    double h = 0.0;
    for (std::size_t c : counts) {
      const double p = static_cast<double>(c) / total;
      h -= p * std::log(p);
    }
    return h;
  };
  const double hx = entropy(nx), hy = entropy(ny);
  if (hx == 0.0 && hy == 0.0) return 1.0;
  if (hx == 0.0 || hy == 0.0) return 0.0;

  double mi = 0.0;
  for (const auto& [cell, count] : joint) {
    // n·N_xy / (N_x·N_y) in exact integer arithmetic before the log.
    const double ratio = static_cast<double>(n * count) /
                         static_cast<double>(nx[cell.first] * ny[cell.second]);
    mi += static_cast<double>(count) / total * std::log(ratio);
  }
  return std::clamp(2.0 * mi / (hx + hy), 0.0, 1.0);
}

std::vector<NodeId> misassigned_nodes(const Partition& found, const Partition& truth) {
  if (found.node_count() != truth.node_count()) {
    throw Error(ErrorCode::kNodeSetMismatch, "partitions cover different node sets");
  }
  std::vector<std::vector<std::size_t>> votes(found.community_count(),
                                              std::vector<std::size_t>(truth.community_count(), 0));
  for (NodeId i = 0; i < found.node_count(); ++i) {
    ++votes[found.community_of(i)][truth.community_of(i)];
  }
  std::vector<std::size_t> majority(found.community_count());
  for (std::size_t c = 0; c < votes.size(); ++c) {
    majority[c] = static_cast<std::size_t>(
        std::max_element(votes[c].begin(), votes[c].end()) - votes[c].begin());
  }
  std::vector<NodeId> out;
  for (NodeId i = 0; i < found.node_count(); ++i) {
    if (truth.community_of(i) != majority[found.community_of(i)]) out.push_back(i);
  }
  return out;
}

void ActivityLog::add(const std::string& user, const std::string& item) {
  const std::size_t idx = item_index_.try_emplace(item, item_index_.size()).first->second;
  auto& items = by_user_[user];
  auto it = std::lower_bound(items.begin(), items.end(), idx);
  if (it == items.end() || *it != idx) items.insert(it, idx);
}

std::span<const std::size_t> ActivityLog::items(const std::string& user) const {
  auto it = by_user_.find(user);
  if (it == by_user_.end()) return {};
  return it->second;
}

namespace {

void finish(QualityReport& report) {
  double sum = 0.0, weighted = 0.0, weight = 0.0;
  for (const auto& c : report.communities) {
    sum += c.value;
    weighted += c.value * static_cast<double>(c.size);
    weight += static_cast<double>(c.size);
  }
  if (!report.communities.empty()) {
    report.mean = sum / static_cast<double>(report.communities.size());
    report.weighted_mean = weighted / weight;
  }
}

void check_cover(const Partition& p, const NodeLabeling& labels) {
  if (p.node_count() != labels.size()) {
    throw Error(ErrorCode::kNodeSetMismatch, "partition and labeling sizes differ");
  }
}

}  // namespace

QualityReport covote_quality(const Partition& communities, const NodeLabeling& labels,
                             const ActivityLog& log, std::size_t min_size) {
  check_cover(communities, labels);
  if (min_size < 2) throw Error(ErrorCode::kConfiguration, "co-vote quality needs min_size >= 2");
  QualityReport report;
  std::vector<std::size_t> per_item(log.item_count(), 0);
  const auto groups = communities.groups();
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto& members = groups[c];
    if (members.size() < min_size) continue;
    // Σ over pairs of shared items = Σ over items of C(voters in community, 2).
    std::vector<std::size_t> touched;
    for (NodeId m : members) {
      const std::string& user = labels.id(m);
      if (!log.contains(user)) ++report.users_missing;
      for (std::size_t item : log.items(user)) {
        if (per_item[item]++ == 0) touched.push_back(item);
      }
    }
    std::uint64_t shared = 0;
    for (std::size_t item : touched) {
      const std::uint64_t k = per_item[item];
      shared += k * (k - 1) / 2;
      per_item[item] = 0;
    }
    const std::uint64_t s = members.size();
    const std::uint64_t pairs = s * (s - 1) / 2;
    report.communities.push_back(
        {c, members.size(), static_cast<double>(shared) / static_cast<double>(pairs)});
  }
  finish(report);
  return report;
}

QualityReport feature_purity(const Partition& communities, const NodeLabeling& labels,
                             const AttributeTable& attrs, const std::string& feature,
                             std::size_t min_size) {
  check_cover(communities, labels);
  auto fit = std::find(attrs.features.begin(), attrs.features.end(), feature);
  if (fit == attrs.features.end()) {
    throw Error(ErrorCode::kUnknownFeature, "unknown feature '" + feature + "'");
  }
  const auto column = static_cast<std::size_t>(fit - attrs.features.begin());
  QualityReport report;
  const auto groups = communities.groups();
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto& members = groups[c];
    if (members.size() < min_size) continue;
    std::map<std::string, std::size_t> counts;
    std::size_t known = 0;
    for (NodeId m : members) {
      auto row = attrs.rows.find(labels.id(m));
      if (row == attrs.rows.end() || column >= row->second.size()) continue;
      const std::string& value = row->second[column];
      if (value.empty()) continue;
      ++counts[value];
      ++known;
    }
    if (known == 0) {
      ++report.communities_excluded;
      continue;
    }
    std::size_t top = 0;
    for (const auto& [value, count] : counts) top = std::max(top, count);
    report.communities.push_back(
        {c, members.size(), static_cast<double>(top) / static_cast<double>(known)});
  }
  finish(report);
  return report;
}

NmiSeries score_time_course(const SimulationEnsemble& ens, const Partition& truth,
                            std::span<const double> tau_grid, double time_per_tau,
                            std::size_t clusters) {
  const std::size_t n = ens.node_count();
  if (truth.node_count() != n) {
    throw Error(ErrorCode::kNodeSetMismatch, "ground truth does not cover the graph");
  }
  NmiSeries series;
  series.kind = ens.kind;
  series.timescale = time_per_tau;
  for (double tau : tau_grid) {
    std::vector<double> sim = pairwise_similarity(ens, tau * time_per_tau);
    const double lowest = *std::min_element(sim.begin(), sim.end());
    Dendrogram tree = average_linkage(sim, n);
    NmiPoint point;
    point.tau = tau;
    point.nmi = nmi(tree.cut(std::clamp<std::size_t>(clusters, 1, n)), truth);
    point.saturated = lowest >= 1.0 - 1e-9;
    series.points.push_back(point);
  }
  return series;
}

std::vector<NmiSeries> nmi_time_course(const Graph& g, const Partition& truth,
                                       std::span<const OperatorKind> kinds,
                                       std::span<const double> tau_grid,
                                       const TimeCourseOptions& options) {
  if (truth.node_count() != g.node_count()) {
    throw Error(ErrorCode::kNodeSetMismatch, "ground truth does not cover the graph");
  }
  const std::size_t clusters = options.clusters ? options.clusters : truth.community_count();
  std::vector<NmiSeries> out;
  for (OperatorKind kind : kinds) {
    InteractionOperator op = make_operator(g, kind);
    NmiSeries series;
    series.kind = kind;
    series.timescale = options.relative_to_timescale ? sync_timescale(op) : 1.0;

    SimulationConfig cfg;
    cfg.coupling = options.coupling;
    cfg.runs = options.runs;
    cfg.seed = options.seed;
    cfg.times.push_back(0.0);
    for (double tau : tau_grid) {
      const double t = tau * series.timescale / options.coupling;
      if (t > cfg.times.back()) cfg.times.push_back(t);
    }
    SimulationEnsemble ens = simulate(op, cfg);

    NmiSeries scored = score_time_course(ens, truth, tau_grid,
                                         series.timescale / options.coupling, clusters);
    series.points = std::move(scored.points);
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace syncomm
