#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>

#include "support/temp_dir.hpp"

using testing_support::read_file;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SYNCOMM_CLI_PATH;
const fs::path kData = SYNCOMM_DATA_DIR;
const std::string kKarate = (kData / "karate.edges").string();

int run(const std::string& args, const fs::path& out) {
  const std::string cmd = "'" + kCli + "' --out '" + out.string() + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, HelpSucceeds) {
  TempDir dir;
  EXPECT_EQ(run("--help", dir.path()), 0);
  EXPECT_EQ(run("simulate --help", dir.path()), 0);
}

TEST(Cli, UsageErrorsExitOne) {
  TempDir dir;
  EXPECT_EQ(run("", dir.path()), 1);
  EXPECT_EQ(run("frobnicate", dir.path()), 1);
  EXPECT_EQ(run("simulate --graph '" + kKarate + "' --times 0,1 --operator bogus", dir.path()), 1);
  EXPECT_EQ(run("simulate --graph '" + kKarate + "' --times -1,1", dir.path()), 1);
  EXPECT_EQ(run("communities --graph '" + kKarate + "' --t 1 --mu 3", dir.path()), 1);
}

TEST(Cli, DataErrorsExitTwo) {
  TempDir dir;
  auto bad = dir.write("bad.edges", "1 2\n3\n");
  EXPECT_EQ(run("simulate --graph '" + bad.string() + "' --times 0,1", dir.path()), 2);
  auto truth = dir.write("truth.csv", "1,A\n");
  auto part = dir.path() / "p";
  ASSERT_EQ(run("communities --graph '" + kKarate + "' --runs 5 --t 1 --mu 0.1", part), 0);
  EXPECT_EQ(run("evaluate nmi --graph '" + kKarate + "' --partition '" + (part / "communities.json").string() +
                    "' --truth '" + truth.string() + "'",
                dir.path()),
            2);
}

TEST(Cli, NumericalErrorsExitThree) {
  TempDir dir;
  EXPECT_EQ(run("simulate --graph '" + kKarate + "' --runs 1 --method euler --step 5 --times 0,100", dir.path()), 3);
}

TEST(Cli, SimulateWritesOneFilePerRun) {
  TempDir dir;
  ASSERT_EQ(run("--seed 3 simulate --graph '" + kKarate + "' --operator replicator --runs 3 --times 0,0.5,1",
                dir.path()),
            0);
  for (const char* f : {"run_0000.csv", "run_0001.csv", "run_0002.csv", "simulation.json"}) {
    EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
  }
  const std::string run0 = read_file(dir.path() / "run_0000.csv");
  EXPECT_EQ(run0.rfind("# ", 0), 0u);
  EXPECT_NE(run0.find("time,1,2,3"), std::string::npos);
  auto meta = nlohmann::json::parse(read_file(dir.path() / "simulation.json"));
  EXPECT_EQ(meta["runs"], 3);
}

TEST(Cli, SpectrumAndRankOrder) {
  TempDir dir;
  ASSERT_EQ(run("spectrum --graph '" + kKarate + "' --operator laplacian --k 4", dir.path()), 0);
  const std::string asc = read_file(dir.path() / "spectrum.csv");
  EXPECT_EQ(asc.rfind("rank,eigenvalue\n1,", 0), 0u);
  ASSERT_EQ(run("spectrum --graph '" + kKarate + "' --operator laplacian --k 4 --rank-desc", dir.path()), 0);
  EXPECT_NE(read_file(dir.path() / "spectrum.csv"), asc);
}

TEST(Cli, CommunitiesDendrogramOnion) {
  TempDir dir;
  const std::string g = " --graph '" + kKarate + "' --operator replicator --runs 20 --tau 1";
  ASSERT_EQ(run("communities" + g + " --mu 0.05", dir.path()), 0);
  auto comm = nlohmann::json::parse(read_file(dir.path() / "communities.json"));
  std::size_t members = 0;
  for (const auto& c : comm["communities"]) members += c.size();
  EXPECT_EQ(members, 34u);

  ASSERT_EQ(run("dendrogram" + g + " --cut 2", dir.path()), 0);
  const std::string nwk = read_file(dir.path() / "dendrogram.nwk");
  EXPECT_EQ(nwk.back() == '\n' ? nwk[nwk.size() - 2] : nwk.back(), ';');
  EXPECT_EQ(nlohmann::json::parse(read_file(dir.path() / "cut.json"))["community_count"], 2);

  ASSERT_EQ(run("onion" + g + " --mu-schedule 0.5,0.1,0.02 --emit-histogram", dir.path()), 0);
  auto onion = nlohmann::json::parse(read_file(dir.path() / "onion.json"));
  EXPECT_FALSE(onion["layers"].empty());
  EXPECT_TRUE(fs::exists(dir.path() / "whiskers.csv"));
}

TEST(Cli, EvaluateAgainstTruth) {
  TempDir dir;
  const std::string truth = (kData / "karate_factions.csv").string();
  ASSERT_EQ(run("dendrogram --graph '" + kKarate + "' --operator replicator --runs 20 --tau 1 --cut 2", dir.path()), 0);
  ASSERT_EQ(run("evaluate nmi --graph '" + kKarate + "' --partition '" + (dir.path() / "cut.json").string() +
                    "' --truth '" + truth + "'",
                dir.path()),
            0);
  EXPECT_FALSE(fs::is_empty(dir.path()));
}

TEST(Cli, GenerateThenPipeline) {
  TempDir dir;
  ASSERT_EQ(run("--seed 4 generate --n 64 --l1 2 --l2 2 --z-in1 8 --z-in2 3 --z-out 0.5", dir.path()), 0);
  for (const char* f : {"benchmark.edges", "truth_communities.csv", "truth_subcommunities.csv"}) {
    EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
  }
  auto cfg = dir.write("run.json", R"({"graph": "benchmark.edges", "truth": "truth_communities.csv",
    "runs": 5, "tau_grid": [0, 1, 10], "mu_schedule": [0.3]})");
  ASSERT_EQ(run("pipeline '" + cfg.string() + "'", dir.path() / "a"), 0);
  ASSERT_EQ(run("pipeline '" + cfg.string() + "'", dir.path() / "b"), 0);
  EXPECT_EQ(read_file(dir.path() / "a" / "bundle.json"), read_file(dir.path() / "b" / "bundle.json"));
  EXPECT_EQ(read_file(dir.path() / "a" / "nmi_laplacian.csv"), read_file(dir.path() / "b" / "nmi_laplacian.csv"));
  auto bad = dir.write("bad.json", R"({"graph": "benchmark.edges", "nonsense": true})");
  EXPECT_EQ(run("pipeline '" + bad.string() + "'", dir.path() / "c"), 1);
}

TEST(Cli, ConfigFileSuppliesOptions) {
  TempDir dir;
  auto cfg = dir.write("opts.json", "{\"seed\": 5, \"spectrum\": {\"graph\": \"" + kKarate + "\", \"k\": 2}}");
  ASSERT_EQ(run("--config '" + cfg.string() + "' spectrum", dir.path()), 0);
  const std::string text = read_file(dir.path() / "spectrum.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
