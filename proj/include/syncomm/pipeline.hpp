#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "syncomm/evaluation.hpp"
#include "syncomm/generator.hpp"
#include "syncomm/graph.hpp"
#include "syncomm/multiscale.hpp"
#include "syncomm/operators.hpp"

namespace syncomm {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string graph;                         // edge list; empty when `benchmark` is set
  std::optional<BenchmarkParams> benchmark;  // synthetic graph instead of a file
  std::string truth;                         // ground-truth CSV
  std::string truth_level = "community";     // benchmark truth: community | sub-community
  std::vector<OperatorKind> models{OperatorKind::kLaplacian, OperatorKind::kReplicator};
  std::optional<double> alpha;
  double coupling = 1.0;
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  /// Multiples of each model's sync timescale; empty gives 30 log-spaced
  /// points over [0.01, 10].
  std::vector<double> tau_grid;
  std::size_t clusters = 0;  // dendrogram cut size; 0 = ground-truth count
  double community_tau = 1.0;
  std::vector<double> mu_schedule;
  std::size_t spectrum_count = 10;
  bool giant_component = true;
  std::string activity_log;
  std::string attributes;
  std::vector<std::string> features;
  std::size_t min_size = 3;
  std::filesystem::path out_dir;  // not part of the hash
};

nlohmann::ordered_json to_json(const RunConfig& cfg, bool include_output = true);
/// Unknown keys are configuration errors.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
void validate(const RunConfig& cfg);

/// FNV-1a 64 over the canonical JSON of the config without `out_dir`, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

std::vector<double> default_tau_grid();

struct MetricRow {
  double mu = 0.0;
  std::string metric;  // covotes | purity:<feature>
  QualityReport report;
};

struct ModelResult {
  OperatorKind kind = OperatorKind::kLaplacian;
  double alpha = 0.0;
  AlphaSource alpha_source = AlphaSource::kNone;
  std::vector<double> spectrum;
  double timescale = 0.0;
  std::optional<NmiSeries> nmi;
  std::optional<Partition> best_cut;          // dendrogram cut at the best-NMI τ
  std::vector<std::string> misassigned;       // external ids, at the best-NMI τ
  std::vector<std::pair<double, Partition>> communities;  // per μ
  std::optional<OnionDecomposition> onion;
  std::vector<MetricRow> metrics;
};

struct ResultBundle {
  RunConfig config;
  std::string config_hash;
  std::string version = kVersion;
  Graph graph;
  std::vector<ModelResult> models;
  std::vector<std::string> notes;
  std::vector<std::filesystem::path> files;  // written, in order, relative to out_dir
};

/// simulate → similarity → clustering/onion → metrics for every model.
/// With a non-empty `out_dir` each stage's files are written as soon as it
/// finishes, and bundle.json last. A failing stage rethrows with the stage
/// name in the message after recording it in bundle.json.
ResultBundle run_pipeline(const RunConfig& cfg);

}  // namespace syncomm
