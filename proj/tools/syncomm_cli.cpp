#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_config.hpp"
#include "syncomm/clustering.hpp"
#include "syncomm/dynamics.hpp"
#include "syncomm/error.hpp"
#include "syncomm/evaluation.hpp"
#include "syncomm/generator.hpp"
#include "syncomm/graph.hpp"
#include "syncomm/io.hpp"
#include "syncomm/multiscale.hpp"
#include "syncomm/pipeline.hpp"
#include "syncomm/similarity.hpp"
#include "syncomm/spectral.hpp"

namespace fs = std::filesystem;
using namespace syncomm;
using ojson = nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "out";
};

/// Graph, model and dynamics options shared by the simulation-based commands.
struct ModelArgs {
  std::string graph;
  std::string op = "laplacian";
  std::optional<double> alpha;
  double coupling = 1.0;
  std::size_t runs = 100;
  std::optional<double> t;
  std::optional<double> tau;
  std::string method = "auto";
};

void add_graph_options(CLI::App* cmd, ModelArgs& a) {
  cmd->add_option("--graph", a.graph, "Edge list file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--operator", a.op,
                  "laplacian | rw-norm | sym-norm | replicator | scaled-adj | modularity")
      ->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "Operator alpha (default: largest adjacency eigenvalue)");
}

void add_dynamics_options(CLI::App* cmd, ModelArgs& a, bool with_time) {
  cmd->add_option("--coupling", a.coupling, "Coupling strength c")->capture_default_str();
  cmd->add_option("--runs", a.runs, "Simulation runs K")->capture_default_str();
  cmd->add_option("--method", a.method, "auto | closed | euler | rk4")->capture_default_str();
  if (with_time) {
    auto* t = cmd->add_option("--t", a.t, "Observation time");
    auto* tau = cmd->add_option("--tau", a.tau, "Observation time in units of the sync timescale");
    t->excludes(tau);
  }
}

/// The operator borrows the graph, so the graph lives on the heap.
struct Model {
  std::unique_ptr<Graph> graph;
  std::optional<InteractionOperator> op;
  double timescale = 0.0;  // 0 when undefined (disconnected graph)
};

Model load_model(const ModelArgs& a, bool with_timescale = true) {
  Model m;
  m.graph = std::make_unique<Graph>(load_edge_list(a.graph).graph);
  m.op.emplace(make_operator(*m.graph, parse_operator_kind(a.op), a.alpha));
  if (with_timescale && connected_components(*m.graph).community_count() == 1) {
    m.timescale = sync_timescale(*m.op);
  }
  return m;
}

double observation_time(const ModelArgs& a, const Model& m) {
  if (a.t) return *a.t;
  const double tau = a.tau.value_or(1.0);
  if (m.timescale == 0.0) {
    throw Error(ErrorCode::kConfiguration, "graph is disconnected; give --t instead of --tau");
  }
  return tau * m.timescale / a.coupling;
}

SimulationEnsemble run_simulation(const ModelArgs& a, const Model& m, std::vector<double> times,
                                  std::uint64_t seed) {
  times.push_back(0.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  SimulationConfig cfg;
  cfg.coupling = a.coupling;
  cfg.runs = a.runs;
  cfg.times = std::move(times);
  cfg.seed = seed;
  cfg.method = parse_integrator(a.method);
  return simulate(*m.op, cfg);
}

std::string fmt(double v) { return format_double(v); }

void report(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scale community discovery by synchronization of interaction dynamics"};
  app.config_formatter(std::make_shared<cli::JsonConfig>());
  app.set_config("--config", "", "JSON file with option values (command line wins)");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  // simulate
  ModelArgs sim_args;
  std::vector<double> sim_times, sim_taus;
  std::optional<double> sim_step;
  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate the dynamics and dump trajectories");
  add_graph_options(simulate_cmd, sim_args);
  add_dynamics_options(simulate_cmd, sim_args, false);
  sim_args.runs = 10;
  auto* times_opt = simulate_cmd->add_option("--times", sim_times, "Sample times t1,t2,...")->delimiter(',');
  auto* taus_opt = simulate_cmd->add_option("--taus", sim_taus, "Sample times in sync timescales")->delimiter(',');
  times_opt->excludes(taus_opt);
  simulate_cmd->add_option("--step", sim_step, "Explicit integrator step");

  // spectrum
  ModelArgs spec_args;
  std::size_t spec_k = 10;
  bool rank_desc = false;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Smallest eigenvalues of an operator");
  add_graph_options(spectrum_cmd, spec_args);
  spectrum_cmd->add_option("--k", spec_k, "Number of eigenvalues")->capture_default_str();
  spectrum_cmd->add_flag("--rank-desc", rank_desc, "Emit in descending order");

  // communities
  ModelArgs comm_args;
  double comm_mu = 0.1;
  auto* communities_cmd = app.add_subcommand("communities", "Threshold communities at one resolution");
  add_graph_options(communities_cmd, comm_args);
  add_dynamics_options(communities_cmd, comm_args, true);
  communities_cmd->add_option("--mu", comm_mu, "Resolution: keep edges with sim >= 1 - mu")
      ->capture_default_str();

  // dendrogram
  ModelArgs dend_args;
  std::size_t dend_cut = 0;
  auto* dendrogram_cmd = app.add_subcommand("dendrogram", "Average-link tree over node similarity");
  add_graph_options(dendrogram_cmd, dend_args);
  add_dynamics_options(dendrogram_cmd, dend_args, true);
  dendrogram_cmd->add_option("--cut", dend_cut, "Also write a flat cut with this many clusters");

  // onion
  ModelArgs onion_args;
  std::vector<double> mu_schedule;
  bool emit_histogram = false;
  auto* onion_cmd = app.add_subcommand("onion", "Core and whisker decomposition over a mu schedule");
  add_graph_options(onion_cmd, onion_args);
  add_dynamics_options(onion_cmd, onion_args, true);
  onion_cmd->add_option("--mu-schedule", mu_schedule, "Descending mu values a,b,c (default: suggested)")
      ->delimiter(',');
  onion_cmd->add_flag("--emit-histogram", emit_histogram, "Write whisker size histograms as CSV");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score communities");
  evaluate_cmd->require_subcommand(1);
  std::string eval_graph, eval_partition, eval_other, eval_truth, eval_log, eval_attrs, eval_feature;
  std::size_t eval_min_size = 3;
  auto add_eval_common = [&](CLI::App* cmd) {
    cmd->add_option("--graph", eval_graph, "Edge list defining the node set")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--partition", eval_partition, "Partition JSON")->required()->check(CLI::ExistingFile);
  };
  auto* nmi_cmd = evaluate_cmd->add_subcommand("nmi", "NMI against a reference");
  add_eval_common(nmi_cmd);
  auto* truth_opt = nmi_cmd->add_option("--truth", eval_truth, "Ground-truth CSV")->check(CLI::ExistingFile);
  auto* other_opt =
      nmi_cmd->add_option("--other", eval_other, "Second partition JSON")->check(CLI::ExistingFile);
  truth_opt->excludes(other_opt);
  auto* covotes_cmd = evaluate_cmd->add_subcommand("covotes", "Mean co-votes per member pair");
  add_eval_common(covotes_cmd);
  covotes_cmd->add_option("--log", eval_log, "Activity CSV (user,item)")->required()->check(CLI::ExistingFile);
  covotes_cmd->add_option("--min-size", eval_min_size, "Smallest community scored")->capture_default_str();
  auto* purity_cmd = evaluate_cmd->add_subcommand("purity", "Feature purity per community");
  add_eval_common(purity_cmd);
  purity_cmd->add_option("--attributes", eval_attrs, "Attribute CSV with header")
      ->required()
      ->check(CLI::ExistingFile);
  purity_cmd->add_option("--feature", eval_feature, "Feature column")->required();
  purity_cmd->add_option("--min-size", eval_min_size, "Smallest community scored")->capture_default_str();

  // generate
  BenchmarkParams bench;
  auto* generate_cmd = app.add_subcommand("generate", "Two-level planted benchmark graph");
  generate_cmd->add_option("--n", bench.n, "Nodes")->capture_default_str();
  generate_cmd->add_option("--l1", bench.l1, "Communities")->capture_default_str();
  generate_cmd->add_option("--l2", bench.l2, "Sub-communities per community")->capture_default_str();
  generate_cmd->add_option("--z-in1", bench.z_in1, "Links inside the sub-community")->capture_default_str();
  generate_cmd->add_option("--z-in2", bench.z_in2, "Links to the rest of the community")->capture_default_str();
  generate_cmd->add_option("--z-out", bench.z_out, "Links outside the community")->capture_default_str();

  // pipeline
  std::string run_config_path;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the full pipeline from a run config");
  pipeline_cmd->add_option("run-config", run_config_path, "Run config JSON")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorCategory::kUsage);
  }

  if (g.threads > 0) omp_set_num_threads(g.threads);
  const fs::path out = g.out;

  try {
    if (*simulate_cmd) {
      Model m = load_model(sim_args);
      std::vector<double> times = sim_times;
      for (double tau : sim_taus) {
        if (m.timescale == 0.0) throw Error(ErrorCode::kConfiguration, "--taus needs a connected graph");
        times.push_back(tau * m.timescale / sim_args.coupling);
      }
      if (times.empty()) throw Error(ErrorCode::kConfiguration, "give --times or --taus");
      std::vector<double> grid = times;
      SimulationEnsemble ens = [&] {
        ModelArgs a = sim_args;
        SimulationConfig cfg;
        grid.push_back(0.0);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        cfg.coupling = a.coupling;
        cfg.runs = a.runs;
        cfg.times = grid;
        cfg.seed = g.seed;
        cfg.method = parse_integrator(a.method);
        cfg.step = sim_step;
        return simulate(*m.op, cfg);
      }();
      std::string header = "time";
      for (const auto& id : m.graph->labels().ids()) header += "," + id;
      for (std::size_t r = 0; r < ens.runs.size(); ++r) {
        std::string body =
            "# run " + std::to_string(r) + "; columns are nodes in dense index order\n" + header + "\n";
        for (std::size_t ti = 0; ti < grid.size(); ++ti) {
          body += fmt(grid[ti]);
          for (double v : ens.runs[r].at(ti)) body += "," + fmt(v);
          body += "\n";
        }
        char name[32];
        std::snprintf(name, sizeof name, "run_%04zu.csv", r);
        write_text(out / name, body);
      }
      ojson j;
      j["operator"] = sim_args.op;
      j["alpha"] = ens.alpha;
      j["coupling"] = sim_args.coupling;
      j["runs"] = ens.runs.size();
      j["seed"] = g.seed;
      j["method"] = sim_args.method;
      j["sync_timescale"] = m.timescale;
      j["times"] = grid;
      write_text(out / "simulation.json", j.dump(2) + "\n");
      std::cout << "wrote " << ens.runs.size() << " trajectories to " << out.string() << "\n";
    } else if (*spectrum_cmd) {
      Model m = load_model(spec_args, false);
      Spectrum s = smallest_eigenvalues(*m.op, std::min(spec_k, m.graph->node_count()));
      std::vector<double> values = s.values;
      if (rank_desc) std::reverse(values.begin(), values.end());
      std::string body = "rank,eigenvalue\n";
      for (std::size_t i = 0; i < values.size(); ++i) body += std::to_string(i + 1) + "," + fmt(values[i]) + "\n";
      write_text(out / "spectrum.csv", body);
      report(out / "spectrum.csv");
    } else if (*communities_cmd) {
      Model m = load_model(comm_args);
      const double t = observation_time(comm_args, m);
      SimulationEnsemble ens = run_simulation(comm_args, m, {t}, g.seed);
      EdgeSimilarityTable sims = edge_similarity(ens, t, *m.graph);
      Partition p = threshold_communities(*m.graph, sims, comm_mu);
      auto j = ojson::parse(partition_json(p, m.graph->labels()));
      j["operator"] = comm_args.op;
      j["t"] = t;
      j["mu"] = comm_mu;
      write_text(out / "communities.json", j.dump(2) + "\n");
      std::cout << p.community_count() << " communities\n";
      report(out / "communities.json");
    } else if (*dendrogram_cmd) {
      Model m = load_model(dend_args);
      const double t = observation_time(dend_args, m);
      SimulationEnsemble ens = run_simulation(dend_args, m, {t}, g.seed);
      Dendrogram tree = hierarchical_cluster(ens, t);
      write_text(out / "dendrogram.nwk", tree.to_newick(m.graph->labels()) + "\n");
      report(out / "dendrogram.nwk");
      if (dend_cut > 0) {
        write_text(out / "cut.json", partition_json(tree.cut(dend_cut), m.graph->labels()));
        report(out / "cut.json");
      }
    } else if (*onion_cmd) {
      Model m = load_model(onion_args);
      const double t = observation_time(onion_args, m);
      SimulationEnsemble ens = run_simulation(onion_args, m, {t}, g.seed);
      EdgeSimilarityTable sims = edge_similarity(ens, t, *m.graph);
      if (mu_schedule.empty()) mu_schedule = suggest_mu_schedule(*m.graph, sims);
      OnionDecomposition dec = onion_decompose(*m.graph, sims, mu_schedule, onion_args.op);
      const auto& labels = m.graph->labels();
      auto ids = [&](const std::vector<NodeId>& nodes) {
        ojson a = ojson::array();
        for (NodeId v : nodes) a.push_back(labels.id(v));
        return a;
      };
      ojson layers = ojson::array();
      std::string hist = "layer,mu,lower,count\n";
      for (std::size_t k = 0; k < dec.layers.size(); ++k) {
        const auto& layer = dec.layers[k];
        SizeHistogram h = whisker_size_distribution(dec, k);
        ojson whiskers = ojson::array();
        for (const auto& w : layer.whiskers) whiskers.push_back(ids(w));
        layers.push_back({{"mu", layer.mu},
                          {"core_size", layer.core.size()},
                          {"core", ids(layer.core)},
                          {"whisker_sizes", h.sizes},
                          {"whiskers", whiskers},
                          {"fragment_groups", layer.fragment_groups},
                          {"fragment_nodes", layer.fragment_nodes}});
        for (const auto& bin : h.bins) {
          hist += std::to_string(k) + "," + fmt(layer.mu) + "," + std::to_string(bin.lower) + "," +
                  std::to_string(bin.count) + "\n";
        }
      }
      ojson j;
      j["operator"] = onion_args.op;
      j["t"] = t;
      j["mu_schedule"] = mu_schedule;
      j["layers"] = layers;
      j["stopped_early"] = dec.stopped_early;
      j["note"] = dec.note;
      write_text(out / "onion.json", j.dump(2) + "\n");
      report(out / "onion.json");
      if (emit_histogram) {
        write_text(out / "whiskers.csv", hist);
        report(out / "whiskers.csv");
      }
      if (dec.stopped_early) std::cerr << "note: " << dec.note << "\n";
    } else if (*evaluate_cmd) {
      Graph graph = load_edge_list(eval_graph).graph;
      Partition p = read_partition_json(eval_partition, graph.labels());
      if (*nmi_cmd) {
        Partition other;
        if (!eval_truth.empty()) {
          other = to_partition(read_ground_truth(eval_truth), graph.labels());
        } else if (!eval_other.empty()) {
          other = read_partition_json(eval_other, graph.labels());
        } else {
          throw Error(ErrorCode::kConfiguration, "give --truth or --other");
        }
        const double value = nmi(p, other);
        ojson j;
        j["nmi"] = value;
        ojson miss = ojson::array();
        for (NodeId v : misassigned_nodes(p, other)) miss.push_back(graph.labels().id(v));
        j["misassigned"] = miss;
        write_text(out / "nmi.json", j.dump(2) + "\n");
        std::cout << "nmi " << fmt(value) << "\n";
      } else {
        QualityReport r;
        std::string name;
        if (*covotes_cmd) {
          r = covote_quality(p, graph.labels(), read_activity_log(eval_log), eval_min_size);
          name = "covotes.csv";
        } else {
          r = feature_purity(p, graph.labels(), read_attribute_table(eval_attrs), eval_feature,
                             eval_min_size);
          name = "purity.csv";
        }
        std::string body = "community,size,value\n";
        for (const auto& c : r.communities) {
          body += std::to_string(c.community) + "," + std::to_string(c.size) + "," + fmt(c.value) + "\n";
        }
        body += "# mean=" + fmt(r.mean) + " weighted_mean=" + fmt(r.weighted_mean) +
                " users_missing=" + std::to_string(r.users_missing) +
                " communities_excluded=" + std::to_string(r.communities_excluded) + "\n";
        write_text(out / name, body);
        std::cout << "mean " << fmt(r.mean) << " weighted " << fmt(r.weighted_mean) << "\n";
      }
    } else if (*generate_cmd) {
      bench.seed = g.seed;
      HierarchicalBenchmark b = generate_hierarchical_benchmark(bench);
      write_edge_list(b.graph, out / "benchmark.edges");
      auto truth_csv = [&](const GroundTruth& t) {
        std::string body = "node,label\n";
        for (const auto& id : b.graph.labels().ids()) body += id + "," + t.label_of.at(id) + "\n";
        return body;
      };
      write_text(out / "truth_communities.csv", truth_csv(b.community_truth));
      write_text(out / "truth_subcommunities.csv", truth_csv(b.sub_community_truth));
      std::cout << b.graph.node_count() << " nodes, " << b.graph.edge_count() << " edges\n";
      report(out);
    } else if (*pipeline_cmd) {
      RunConfig cfg = load_run_config(run_config_path);
      if (app.count("--seed")) cfg.seed = g.seed;
      if (app.count("--out") || cfg.out_dir.empty()) cfg.out_dir = g.out;
      ResultBundle bundle = run_pipeline(cfg);
      for (const auto& m : bundle.models) {
        std::cout << to_string(m.kind) << ": sync timescale " << fmt(m.timescale);
        if (m.nmi) {
          double best = 0.0;
          for (const auto& p : m.nmi->points) best = std::max(best, p.nmi);
          std::cout << ", max NMI " << fmt(best);
        }
        std::cout << "\n";
      }
      for (const auto& note : bundle.notes) std::cout << "note: " << note << "\n";
      std::cout << "bundle " << bundle.config_hash << " in " << cfg.out_dir.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::kData);
  }
  return 0;
}
