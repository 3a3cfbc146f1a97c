#include "syncomm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "syncomm/clustering.hpp"
#include "syncomm/dynamics.hpp"
#include "syncomm/error.hpp"
#include "syncomm/io.hpp"
#include "syncomm/similarity.hpp"
#include "syncomm/spectral.hpp"

namespace syncomm {

using ojson = nlohmann::ordered_json;

namespace {

const std::set<std::string> kConfigKeys = {
    "graph",  "benchmark",      "truth",     "truth_level",    "models",
    "alpha",  "coupling",       "runs",      "seed",           "tau_grid",
    "clusters", "community_tau", "mu_schedule", "spectrum_count", "giant_component",
    "activity_log", "attributes", "features", "min_size",     "out_dir"};

const std::set<std::string> kBenchmarkKeys = {"n", "l1", "l2", "z_in1", "z_in2", "z_out", "seed"};

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfiguration, std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::kConfiguration, std::string("unknown key '") + key + "' in " + where);
    }
  }
}

}  // namespace

ojson to_json(const RunConfig& cfg, bool include_output) {
  ojson j;
  j["graph"] = cfg.graph;
  if (cfg.benchmark) {
    const auto& b = *cfg.benchmark;
    j["benchmark"] = {{"n", b.n},         {"l1", b.l1},         {"l2", b.l2},   {"z_in1", b.z_in1},
                      {"z_in2", b.z_in2}, {"z_out", b.z_out},   {"seed", b.seed}};
  } else {
    j["benchmark"] = nullptr;
  }
  j["truth"] = cfg.truth;
  j["truth_level"] = cfg.truth_level;
  auto& models = j["models"] = ojson::array();
  for (OperatorKind k : cfg.models) models.push_back(std::string(to_string(k)));
  j["alpha"] = cfg.alpha ? ojson(*cfg.alpha) : ojson(nullptr);
  j["coupling"] = cfg.coupling;
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["tau_grid"] = cfg.tau_grid;
  j["clusters"] = cfg.clusters;
  j["community_tau"] = cfg.community_tau;
  j["mu_schedule"] = cfg.mu_schedule;
  j["spectrum_count"] = cfg.spectrum_count;
  j["giant_component"] = cfg.giant_component;
  j["activity_log"] = cfg.activity_log;
  j["attributes"] = cfg.attributes;
  j["features"] = cfg.features;
  j["min_size"] = cfg.min_size;
  if (include_output) j["out_dir"] = cfg.out_dir.string();
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  reject_unknown(j, kConfigKeys, "config");
  RunConfig cfg;
  read_field(j, "graph", cfg.graph);
  if (j.contains("benchmark") && !j["benchmark"].is_null()) {
    const auto& b = j["benchmark"];
    reject_unknown(b, kBenchmarkKeys, "benchmark");
    BenchmarkParams p;
    read_field(b, "n", p.n);
    read_field(b, "l1", p.l1);
    read_field(b, "l2", p.l2);
    read_field(b, "z_in1", p.z_in1);
    read_field(b, "z_in2", p.z_in2);
    read_field(b, "z_out", p.z_out);
    read_field(b, "seed", p.seed);
    cfg.benchmark = p;
  }
  read_field(j, "truth", cfg.truth);
  read_field(j, "truth_level", cfg.truth_level);
  if (j.contains("models")) {
    std::vector<std::string> names;
    read_field(j, "models", names);
    cfg.models.clear();
    for (const auto& name : names) cfg.models.push_back(parse_operator_kind(name));
  }
  if (j.contains("alpha") && !j["alpha"].is_null()) {
    double a = 0.0;
    read_field(j, "alpha", a);
    cfg.alpha = a;
  }
  read_field(j, "coupling", cfg.coupling);
  read_field(j, "runs", cfg.runs);
  read_field(j, "seed", cfg.seed);
  read_field(j, "tau_grid", cfg.tau_grid);
  read_field(j, "clusters", cfg.clusters);
  read_field(j, "community_tau", cfg.community_tau);
  read_field(j, "mu_schedule", cfg.mu_schedule);
  read_field(j, "spectrum_count", cfg.spectrum_count);
  read_field(j, "giant_component", cfg.giant_component);
  read_field(j, "activity_log", cfg.activity_log);
  read_field(j, "attributes", cfg.attributes);
  read_field(j, "features", cfg.features);
  read_field(j, "min_size", cfg.min_size);
  std::string out;
  read_field(j, "out_dir", out);
  cfg.out_dir = out;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, path.string() + ": " + e.what());
  }
  RunConfig cfg = run_config_from_json(j);
  // Relative data paths resolve against the config file's directory.
  const auto base = path.parent_path();
  for (std::string* p : {&cfg.graph, &cfg.truth, &cfg.activity_log, &cfg.attributes}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
  }
  return cfg;
}

void validate(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfiguration, msg); };
  if (cfg.graph.empty() == !cfg.benchmark) fail("exactly one of 'graph' and 'benchmark' must be set");
  if (cfg.truth_level != "community" && cfg.truth_level != "sub-community") {
    fail("truth_level must be 'community' or 'sub-community'");
  }
  if (cfg.models.empty()) fail("no models selected");
  if (cfg.alpha && !(std::isfinite(*cfg.alpha) && *cfg.alpha > 0.0)) fail("alpha must be positive");
  if (!(std::isfinite(cfg.coupling) && cfg.coupling > 0.0)) fail("coupling must be positive");
  if (cfg.runs == 0) fail("runs must be at least 1");
  for (double tau : cfg.tau_grid) {
    if (!(std::isfinite(tau) && tau >= 0.0)) fail("tau grid entries must be non-negative");
  }
  if (!(std::isfinite(cfg.community_tau) && cfg.community_tau >= 0.0)) {
    fail("community_tau must be non-negative");
  }
  for (std::size_t i = 0; i < cfg.mu_schedule.size(); ++i) {
    const double mu = cfg.mu_schedule[i];
    if (!(mu > 0.0 && mu <= 2.0)) fail("mu values must lie in (0, 2]");
    if (i > 0 && !(mu < cfg.mu_schedule[i - 1])) fail("mu schedule must be strictly descending");
  }
  if (cfg.min_size < 2) fail("min_size must be at least 2");
  if (!cfg.features.empty() && cfg.attributes.empty()) fail("features need an attribute table");
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = to_json(cfg, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid(30);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = 0.01 * std::pow(1000.0, static_cast<double>(i) / 29.0);
  }
  return grid;
}

namespace {

class Writer {
 public:
  Writer(const RunConfig& cfg, std::string hash, ResultBundle& bundle)
      : dir_(cfg.out_dir), hash_(std::move(hash)), bundle_(bundle) {}

  bool enabled() const { return !dir_.empty(); }

  void csv(const std::string& name, const std::string& body) {
    emit(name, "# config_hash=" + hash_ + "\n" + body);
  }
  void json(const std::string& name, ojson j) {
    ojson out;
    out["config_hash"] = hash_;
    for (auto& [k, v] : j.items()) out[k] = v;
    emit(name, out.dump(2) + "\n");
  }

 private:
  void emit(const std::string& name, const std::string& text) {
    if (!enabled()) return;
    write_text(dir_ / name, text);
    bundle_.files.push_back(name);
  }

  std::filesystem::path dir_;
  std::string hash_;
  ResultBundle& bundle_;
};

std::string fmt(double v) { return format_double(v); }

ojson groups_json(const std::vector<std::vector<NodeId>>& groups, const NodeLabeling& labels) {
  ojson out = ojson::array();
  for (const auto& g : groups) {
    ojson ids = ojson::array();
    for (NodeId v : g) ids.push_back(labels.id(v));
    out.push_back(std::move(ids));
  }
  return out;
}

std::vector<double> time_grid(const RunConfig& cfg, const std::vector<double>& taus, double per_tau) {
  std::vector<double> times{0.0};
  for (double tau : taus) times.push_back(tau * per_tau);
  times.push_back(cfg.community_tau * per_tau);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

struct Inputs {
  Graph graph;
  std::optional<Partition> truth;
  std::optional<ActivityLog> log;
  std::optional<AttributeTable> attributes;
};

Inputs load_inputs(const RunConfig& cfg, ResultBundle& bundle) {
  Inputs in;
  GroundTruth truth;
  bool have_truth = false;
  if (cfg.benchmark) {
    HierarchicalBenchmark b = generate_hierarchical_benchmark(*cfg.benchmark);
    in.graph = std::move(b.graph);
    truth = cfg.truth_level == "community" ? b.community_truth : b.sub_community_truth;
    have_truth = true;
  } else {
    EdgeListLoad load = load_edge_list(cfg.graph);
    in.graph = std::move(load.graph);
    if (load.report.self_loops_dropped || load.report.duplicates_dropped) {
      bundle.notes.push_back("dropped " + std::to_string(load.report.self_loops_dropped) +
                             " self-loops and " + std::to_string(load.report.duplicates_dropped) +
                             " duplicate edges");
    }
  }
  if (!cfg.truth.empty()) {
    truth = read_ground_truth(cfg.truth);
    have_truth = true;
  }
  if (cfg.giant_component && connected_components(in.graph).community_count() > 1) {
    Subgraph giant = giant_component(in.graph);
    bundle.notes.push_back("restricted to the giant component: " +
                           std::to_string(giant.graph.node_count()) + " of " +
                           std::to_string(in.graph.node_count()) + " nodes");
    in.graph = std::move(giant.graph);
  }
  if (have_truth) {
    GroundTruth kept;
    for (const auto& id : in.graph.labels().ids()) {
      auto it = truth.label_of.find(id);
      if (it != truth.label_of.end()) kept.label_of.insert(*it);
    }
    in.truth = to_partition(kept, in.graph.labels());
  }
  if (!cfg.activity_log.empty()) in.log = read_activity_log(cfg.activity_log);
  if (!cfg.attributes.empty()) in.attributes = read_attribute_table(cfg.attributes);
  return in;
}

void run_model(const RunConfig& cfg, const Inputs& in, OperatorKind kind, ResultBundle& bundle,
               Writer& out, std::string& stage) {
  const Graph& g = in.graph;
  const std::string name(to_string(kind));
  ModelResult result;
  result.kind = kind;

  stage = name + "/spectrum";
  InteractionOperator op = make_operator(g, kind, cfg.alpha);
  result.alpha = op.alpha();
  result.alpha_source = op.alpha_source();
  Spectrum spec = smallest_eigenvalues(op, std::min(cfg.spectrum_count, g.node_count()));
  result.spectrum = spec.values;
  result.timescale = sync_timescale(op);
  {
    std::string body = "index,eigenvalue\n";
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      body += std::to_string(i) + "," + fmt(spec.values[i]) + "\n";
    }
    out.csv("spectrum_" + name + ".csv", body);
  }

  stage = name + "/simulate";
  const std::vector<double> taus = cfg.tau_grid.empty() ? default_tau_grid() : cfg.tau_grid;
  const double per_tau = result.timescale / cfg.coupling;
  SimulationConfig sim;
  sim.coupling = cfg.coupling;
  sim.runs = cfg.runs;
  sim.seed = cfg.seed;
  sim.times = time_grid(cfg, taus, per_tau);
  SimulationEnsemble ens = simulate(op, sim);

  if (in.truth) {
    stage = name + "/nmi";
    const std::size_t clusters = cfg.clusters ? cfg.clusters : in.truth->community_count();
    NmiSeries series = score_time_course(ens, *in.truth, taus, per_tau, clusters);
    std::string body = "tau,time,nmi,saturated\n";
    std::size_t best = 0;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      const auto& p = series.points[i];
      body += fmt(p.tau) + "," + fmt(p.tau * per_tau) + "," + fmt(p.nmi) + "," +
              (p.saturated ? "1" : "0") + "\n";
      if (p.nmi > series.points[best].nmi) best = i;
    }
    out.csv("nmi_" + name + ".csv", body);
    if (!series.points.empty()) {
      const double t = series.points[best].tau * per_tau;
      Dendrogram tree = hierarchical_cluster(ens, t);
      Partition cut = tree.cut(std::clamp<std::size_t>(clusters, 1, g.node_count()));
      for (NodeId v : misassigned_nodes(cut, *in.truth)) result.misassigned.push_back(g.labels().id(v));
      ojson j;
      j["model"] = name;
      j["tau"] = series.points[best].tau;
      j["nmi"] = series.points[best].nmi;
      j["communities"] = groups_json(cut.groups(), g.labels());
      j["misassigned"] = result.misassigned;
      out.json("partition_" + name + ".json", std::move(j));
      result.best_cut = std::move(cut);
    }
    result.nmi = std::move(series);
  }

  stage = name + "/communities";
  const double community_time = cfg.community_tau * per_tau;
  EdgeSimilarityTable sims = edge_similarity(ens, community_time, g);
  {
    ojson levels = ojson::array();
    for (double mu : cfg.mu_schedule) {
      Partition p = threshold_communities(g, sims, mu);
      levels.push_back({{"mu", mu}, {"communities", groups_json(p.groups(), g.labels())}});
      result.communities.emplace_back(mu, std::move(p));
    }
    ojson j;
    j["model"] = name;
    j["tau"] = cfg.community_tau;
    j["levels"] = std::move(levels);
    out.json("communities_" + name + ".json", std::move(j));
  }

  stage = name + "/onion";
  if (cfg.mu_schedule.empty()) {
    bundle.notes.push_back(name + ": empty mu schedule, onion stage skipped");
  } else {
    OnionDecomposition dec = onion_decompose(g, sims, cfg.mu_schedule, name);
    ojson layers = ojson::array();
    std::string hist = "layer,mu,lower,upper,count\n";
    for (std::size_t k = 0; k < dec.layers.size(); ++k) {
      const auto& layer = dec.layers[k];
      layers.push_back({{"mu", layer.mu},
                        {"core_size", layer.core.size()},
                        {"core", groups_json({layer.core}, g.labels())[0]},
                        {"whiskers", groups_json(layer.whiskers, g.labels())},
                        {"fragment_groups", layer.fragment_groups},
                        {"fragment_nodes", layer.fragment_nodes}});
      for (const auto& bin : whisker_size_distribution(dec, k).bins) {
        hist += std::to_string(k) + "," + fmt(layer.mu) + "," + std::to_string(bin.lower) + "," +
                std::to_string(bin.upper) + "," + std::to_string(bin.count) + "\n";
      }
    }
    ojson j;
    j["model"] = name;
    j["tau"] = cfg.community_tau;
    j["layers"] = std::move(layers);
    j["stopped_early"] = dec.stopped_early;
    j["note"] = dec.note;
    out.json("onion_" + name + ".json", std::move(j));
    out.csv("whiskers_" + name + ".csv", hist);
    if (dec.stopped_early) bundle.notes.push_back(name + ": " + dec.note);
    result.onion = std::move(dec);
  }

  stage = name + "/metrics";
  if ((in.log || in.attributes) && !result.communities.empty()) {
    std::string body = "mu,metric,communities,mean,weighted_mean,users_missing,excluded\n";
    for (const auto& [mu, p] : result.communities) {
      std::vector<MetricRow> rows;
      if (in.log) rows.push_back({mu, "covotes", covote_quality(p, g.labels(), *in.log, cfg.min_size)});
      for (const auto& f : cfg.features) {
        rows.push_back({mu, "purity:" + f, feature_purity(p, g.labels(), *in.attributes, f, cfg.min_size)});
      }
      for (auto& row : rows) {
        body += fmt(mu) + "," + row.metric + "," + std::to_string(row.report.communities.size()) + "," +
                fmt(row.report.mean) + "," + fmt(row.report.weighted_mean) + "," +
                std::to_string(row.report.users_missing) + "," +
                std::to_string(row.report.communities_excluded) + "\n";
        result.metrics.push_back(std::move(row));
      }
    }
    out.csv("metrics_" + name + ".csv", body);
  }
  bundle.models.push_back(std::move(result));
}

ojson bundle_json(const ResultBundle& b, const std::string& failed_stage, const std::string& error) {
  ojson j;
  j["version"] = b.version;
  j["config_hash"] = b.config_hash;
  j["config"] = to_json(b.config, false);
  j["graph"] = {{"nodes", b.graph.node_count()}, {"edges", b.graph.edge_count()}};
  ojson models = ojson::array();
  for (const auto& m : b.models) {
    ojson mj;
    mj["model"] = std::string(to_string(m.kind));
    mj["alpha"] = m.alpha;
    mj["alpha_source"] = m.alpha_source == AlphaSource::kLambdaMax ? "lambda_max"
                         : m.alpha_source == AlphaSource::kUser    ? "user"
                                                                   : "none";
    mj["sync_timescale"] = m.timescale;
    if (m.nmi) {
      double best = 0.0, best_tau = 0.0;
      for (const auto& p : m.nmi->points) {
        if (p.nmi > best) {
          best = p.nmi;
          best_tau = p.tau;
        }
      }
      mj["max_nmi"] = best;
      mj["max_nmi_tau"] = best_tau;
      mj["misassigned"] = m.misassigned;
    }
    if (m.onion) mj["onion_layers"] = m.onion->layers.size();
    models.push_back(std::move(mj));
  }
  j["models"] = std::move(models);
  j["notes"] = b.notes;
  ojson files = ojson::array();
  for (const auto& f : b.files) files.push_back(f.string());
  j["files"] = std::move(files);
  if (!failed_stage.empty()) {
    j["failed_stage"] = failed_stage;
    j["error"] = error;
  }
  return j;
}

}  // namespace

ResultBundle run_pipeline(const RunConfig& cfg) {
  validate(cfg);
  ResultBundle bundle;
  bundle.config = cfg;
  bundle.config_hash = config_hash(cfg);
  Writer out(cfg, bundle.config_hash, bundle);

  std::string stage = "load";
  auto finish = [&](const std::string& failed, const std::string& error) {
    if (!out.enabled()) return;
    write_text(cfg.out_dir / "bundle.json", bundle_json(bundle, failed, error).dump(2) + "\n");
  };
  try {
    Inputs in = load_inputs(cfg, bundle);
    bundle.graph = in.graph;
    if (!in.truth) bundle.notes.push_back("no ground truth, NMI stage skipped");
    for (OperatorKind kind : cfg.models) run_model(cfg, in, kind, bundle, out, stage);
  } catch (const Error& e) {
    finish(stage, e.what());
    throw Error(e.code(), "stage '" + stage + "': " + e.what());
  }
  finish({}, {});
  return bundle;
}

}  // namespace syncomm
