#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "syncomm/dynamics.hpp"
#include "syncomm/error.hpp"
#include "syncomm/spectral.hpp"

using namespace syncomm;

namespace {

std::vector<double> random_phases(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

Graph path3() { return oracle::make_graph(3, {{0, 1}, {1, 2}}); }

}  // namespace

TEST(ClosedForm, K2LaplacianHandSolution) {
  Graph g = oracle::make_graph(2, {{0, 1}});
  std::vector<double> theta0{1.0, -1.0};
  auto theta = closed_form(build_operator(g, OperatorKind::kLaplacian), theta0, {}, 1.0, 1.0);
  EXPECT_NEAR(theta[0], std::exp(-2.0), 1e-14);
  EXPECT_NEAR(theta[1], -std::exp(-2.0), 1e-14);
  EXPECT_NEAR(theta[0], 0.13534, 1e-5);
}

TEST(ClosedForm, TimeZeroIsExact) {
  Graph g = oracle::random_connected_graph(12, 0.3, 3);
  auto theta0 = random_phases(12, 1);
  for (OperatorKind kind : kAllOperatorKinds) {
    InteractionOperator op = make_operator(g, kind);
    EXPECT_EQ(closed_form(op, theta0, {}, 1.0, 0.0), theta0);
  }
}

TEST(ClosedForm, TriangleSeries) {
  Graph g = oracle::make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  std::vector<double> theta0{1.0, 0.0, 0.0};
  auto theta = closed_form(build_operator(g, OperatorKind::kLaplacian), theta0, {}, 1.0, 1.0);
  // Mean 1/3 on λ = 0; the rest decays on the λ = 3 eigenspace.
  const double decay = std::exp(-3.0);
  EXPECT_NEAR(theta[0], 1.0 / 3 + 2.0 / 3 * decay, 1e-14);
  EXPECT_NEAR(theta[1], 1.0 / 3 - 1.0 / 3 * decay, 1e-14);
  EXPECT_NEAR(theta[2], 1.0 / 3 - 1.0 / 3 * decay, 1e-14);
}

TEST(ClosedForm, LaplacianLongTimeIsMean) {
  Graph g = oracle::random_connected_graph(15, 0.2, 6);
  auto theta0 = random_phases(15, 2);
  const double mean = std::accumulate(theta0.begin(), theta0.end(), 0.0) / 15;
  for (double v : closed_form(build_operator(g, OperatorKind::kLaplacian), theta0, {}, 1.0, 500.0)) {
    EXPECT_NEAR(v, mean, 1e-12);
  }
}

TEST(ClosedForm, MatchesMatrixExponentialAllKinds) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = oracle::random_connected_graph(10 + seed, 0.25, seed);
    auto theta0 = random_phases(g.node_count(), seed);
    for (OperatorKind kind : kAllOperatorKinds) {
      InteractionOperator op = make_operator(g, kind);
      ClosedFormSolver solver(op);
      Eigen::MatrixXd dense = oracle::dense_operator(g, kind, op.alpha());
      for (double t : {0.1, 0.7, 2.0}) {
        auto got = solver.evaluate(theta0, {}, 0.8, t);
        auto expected = oracle::expm_apply(dense, 0.8 * t, theta0);
        EXPECT_LT(max_diff(got, expected), 1e-9) << to_string(kind) << " t=" << t;
      }
    }
  }
}

TEST(ClosedForm, ReplicatorOnPathAgainstExpm) {
  Graph g = path3();
  InteractionOperator op = build_operator(g, OperatorKind::kReplicator, std::sqrt(2.0));
  Eigen::MatrixXd dense = oracle::dense_operator(g, OperatorKind::kReplicator, std::sqrt(2.0));
  SimulationConfig cfg;
  cfg.runs = 1;
  cfg.times = {0.0, 0.5, 1.0, 5.0};
  cfg.seed = 4;
  cfg.method = Integrator::kClosedForm;
  SimulationEnsemble ens = simulate(op, cfg);
  auto start = ens.runs[0].at(0);
  std::vector<double> th0(start.begin(), start.end());
  for (std::size_t ti = 1; ti < cfg.times.size(); ++ti) {
    auto expected = oracle::expm_apply(dense, cfg.times[ti], th0);
    EXPECT_LT(max_diff(ens.runs[0].at(ti), expected), 1e-8);
  }
}

TEST(ClosedForm, ForcedSolution) {
  // Replicator above λ_max is invertible: θ(∞) = (c·R)⁻¹ω.
  Graph g = oracle::random_connected_graph(8, 0.3, 2);
  const double alpha = oracle::dense_lambda_max(g) + 1.0;
  InteractionOperator op = build_operator(g, OperatorKind::kReplicator, alpha);
  auto theta0 = random_phases(8, 3), omega = random_phases(8, 4);
  Eigen::MatrixXd r = oracle::dense_operator(g, OperatorKind::kReplicator, alpha);
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(omega.data(), 8);
  Eigen::VectorXd fixed = (2.0 * r).ldlt().solve(w);
  auto late = closed_form(op, theta0, omega, 2.0, 200.0);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(late[static_cast<std::size_t>(i)], fixed(i), 1e-10);
  // Intermediate time from the shifted matrix exponential.
  std::vector<double> shifted(8);
  for (int i = 0; i < 8; ++i) shifted[static_cast<std::size_t>(i)] = theta0[static_cast<std::size_t>(i)] - fixed(i);
  auto decayed = oracle::expm_apply(r, 2.0 * 0.3, shifted);
  auto mid = closed_form(op, theta0, omega, 2.0, 0.3);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(mid[static_cast<std::size_t>(i)], decayed[static_cast<std::size_t>(i)] + fixed(i), 1e-10);
}

TEST(ClosedForm, SingularOperatorWithOmega) {
  Graph g = path3();
  std::vector<double> theta0{0, 0, 0}, omega{1, 0, 0};
  EXPECT_EQ(code_of([&] { closed_form(build_operator(g, OperatorKind::kLaplacian), theta0, omega, 1, 1); }),
            ErrorCode::kSingularOperator);
}

TEST(ClosedForm, SizeCap) {
  Graph g = oracle::random_connected_graph(10, 0.2, 1);
  EXPECT_EQ(code_of([&] { ClosedFormSolver(build_operator(g, OperatorKind::kLaplacian), 5); }),
            ErrorCode::kSizeCap);
}

TEST(SteadyState, LaplacianMean) {
  Graph g = oracle::make_graph(2, {{0, 1}});
  std::vector<double> theta0{2.0, 4.0};
  auto eq = steady_state(build_operator(g, OperatorKind::kLaplacian), theta0);
  EXPECT_DOUBLE_EQ(eq[0], 3.0);
  EXPECT_DOUBLE_EQ(eq[1], 3.0);
}

TEST(SteadyState, ReplicatorPathIsDominantShape) {
  std::vector<double> theta0{0.3, -1.0, 2.0};
  Graph g = path3();
  auto eq = steady_state(build_operator(g, OperatorKind::kReplicator, std::sqrt(2.0)), theta0);
  EXPECT_NEAR(eq[1] / eq[0], std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(eq[2] / eq[0], 1.0, 1e-10);
  // Scale: projection onto the unit dominant vector.
  const double s = (0.3 + std::sqrt(2.0) * -1.0 + 2.0) / 4.0;
  EXPECT_NEAR(eq[0], s, 1e-10);
}

TEST(SteadyState, ScaledAdjacencyAboveLambdaMaxIsZero) {
  Graph g = oracle::random_connected_graph(10, 0.3, 5);
  auto theta0 = random_phases(10, 5);
  auto eq = steady_state(build_operator(g, OperatorKind::kScaledAdjacency, 2 * oracle::dense_lambda_max(g)), theta0);
  for (double v : eq) EXPECT_EQ(v, 0.0);
}

TEST(SteadyState, NormalizedKindsConserveTheirFunctional) {
  Graph g = oracle::random_connected_graph(14, 0.2, 7);
  auto theta0 = random_phases(14, 7);
  auto rw = steady_state(build_operator(g, OperatorKind::kRandomWalkNorm), theta0);
  auto sym = steady_state(build_operator(g, OperatorKind::kSymNorm), theta0);
  double sum0 = 0, sum_rw = 0, sq0 = 0, sq_sym = 0;
  for (NodeId i = 0; i < 14; ++i) {
    const double d = static_cast<double>(g.degree(i));
    EXPECT_NEAR(rw[i] / d, rw[0] / static_cast<double>(g.degree(0)), 1e-12);
    EXPECT_NEAR(sym[i] / std::sqrt(d), sym[0] / std::sqrt(static_cast<double>(g.degree(0))), 1e-12);
    sum0 += theta0[i];
    sum_rw += rw[i];
    sq0 += std::sqrt(d) * theta0[i];
    sq_sym += std::sqrt(d) * sym[i];
  }
  EXPECT_NEAR(sum_rw, sum0, 1e-12);
  EXPECT_NEAR(sq_sym, sq0, 1e-12);
}

TEST(SteadyState, MatchesLongClosedForm) {
  Graph g = oracle::random_connected_graph(12, 0.25, 8);
  auto theta0 = random_phases(12, 8);
  for (OperatorKind kind : {OperatorKind::kLaplacian, OperatorKind::kRandomWalkNorm, OperatorKind::kSymNorm,
                            OperatorKind::kReplicator, OperatorKind::kScaledAdjacency}) {
    InteractionOperator op = make_operator(g, kind);
    const double late = 60.0 * sync_timescale(op);
    EXPECT_LT(max_diff(steady_state(op, theta0), closed_form(op, theta0, {}, 1.0, late)), 1e-9)
        << to_string(kind);
  }
}

TEST(SteadyState, PerComponent) {
  Graph g = oracle::make_graph(5, {{0, 1}, {2, 3}, {3, 4}});
  std::vector<double> theta0{1, 3, 0, 3, 6};
  auto eq = steady_state(build_operator(g, OperatorKind::kLaplacian), theta0);
  EXPECT_EQ(eq, (std::vector<double>{2, 2, 3, 3, 3}));
}

TEST(SteadyState, Unsupported) {
  Graph g = path3();
  std::vector<double> theta0{1, 2, 3}, omega{0, 1, 0};
  EXPECT_EQ(code_of([&] { steady_state(build_operator(g, OperatorKind::kLaplacian), theta0, omega); }),
            ErrorCode::kNotImplemented);
  EXPECT_EQ(code_of([&] { steady_state(build_operator(g, OperatorKind::kModularity), theta0); }),
            ErrorCode::kNotImplemented);
}

TEST(Simulate, FixedPointStaysPut) {
  Graph g = oracle::random_connected_graph(10, 0.3, 9);
  InteractionOperator op = make_operator(g, OperatorKind::kReplicator);
  auto eq = steady_state(op, random_phases(10, 1));
  for (auto method : {Integrator::kClosedForm, Integrator::kRungeKutta4, Integrator::kEuler}) {
    Trajectory tr = integrate_explicit(op, eq, {}, 1.0, std::vector<double>{0.0, 1.0, 10.0},
                                       method == Integrator::kClosedForm ? Integrator::kRungeKutta4 : method);
    for (std::size_t ti = 0; ti < 3; ++ti) EXPECT_LT(max_diff(tr.at(ti), eq), 1e-10);
    auto cf = closed_form(op, eq, {}, 1.0, 10.0);
    EXPECT_LT(max_diff(cf, eq), 1e-10);
  }
}

TEST(Simulate, ConservationClosedForm) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Graph g = oracle::random_connected_graph(20, 0.15, seed);
    for (OperatorKind kind : kAllOperatorKinds) {
      InteractionOperator op = make_operator(g, kind);
      if (kind == OperatorKind::kModularity) continue;  // indefinite; covered by the acceptance suite
      auto w = left_null_vector(op);
      SimulationConfig cfg;
      cfg.runs = 3;
      cfg.seed = seed;
      const double ts = sync_timescale(op);
      cfg.times = {0.0, 0.5 * ts, ts, 3 * ts, 5 * ts};
      SimulationEnsemble ens = simulate(op, cfg);
      for (const auto& run : ens.runs) {
        const double w0 = dot(w, run.at(0));
        for (std::size_t ti = 1; ti < cfg.times.size(); ++ti) {
          EXPECT_LE(std::abs(dot(w, run.at(ti)) - w0), 1e-8 * std::abs(w0)) << to_string(kind);
        }
      }
    }
  }
}

TEST(Simulate, MonotoneSynchronization) {
  Graph g = oracle::random_connected_graph(25, 0.1, 3);
  for (OperatorKind kind : {OperatorKind::kLaplacian, OperatorKind::kSymNorm, OperatorKind::kReplicator,
                            OperatorKind::kScaledAdjacency}) {
    InteractionOperator op = make_operator(g, kind);
    SimulationConfig cfg;
    cfg.runs = 3;
    cfg.seed = 2;
    const double ts = sync_timescale(op);
    for (int k = 0; k <= 20; ++k) cfg.times.push_back(0.25 * k * ts);
    SimulationEnsemble ens = simulate(op, cfg);
    for (std::size_t r = 0; r < ens.runs.size(); ++r) {
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        double dev = 0;
        auto th = ens.runs[r].at(ti);
        for (std::size_t i = 0; i < th.size(); ++i) dev += std::pow(th[i] - ens.equilibria[r][i], 2);
        dev = std::sqrt(dev);
        EXPECT_LE(dev, prev + 1e-12) << to_string(kind);
        prev = dev;
      }
    }
  }
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
  Graph g = oracle::random_connected_graph(30, 0.1, 4);
  InteractionOperator op = make_operator(g, OperatorKind::kReplicator);
  SimulationConfig cfg;
  cfg.runs = 16;
  cfg.seed = 99;
  cfg.times = {0.0, 0.5, 2.0};
  omp_set_num_threads(1);
  SimulationEnsemble a = simulate(op, cfg);
  omp_set_num_threads(4);
  SimulationEnsemble b = simulate(op, cfg);
  SimulationEnsemble c = simulate(op, cfg);
  omp_set_num_threads(omp_get_num_procs());
  EXPECT_EQ(a.runs, b.runs);
  EXPECT_EQ(b.runs, c.runs);
  cfg.seed = 100;
  EXPECT_NE(simulate(op, cfg).runs, a.runs);
}

TEST(Simulate, RunsStartAtSampledPhases) {
  Graph g = oracle::random_connected_graph(10, 0.3, 1);
  SimulationConfig cfg;
  cfg.runs = 4;
  cfg.seed = 5;
  cfg.times = {0.0, 1.0};
  SimulationEnsemble ens = simulate(make_operator(g, OperatorKind::kLaplacian), cfg);
  for (std::size_t r = 0; r < 4; ++r) {
    auto th0 = initial_phases(5, r, 10);
    auto start = ens.runs[r].at(0);
    EXPECT_TRUE(std::equal(th0.begin(), th0.end(), start.begin()));
    for (double v : th0) {
      EXPECT_GE(v, -std::numbers::pi);
      EXPECT_LT(v, std::numbers::pi);
    }
  }
  EXPECT_NE(initial_phases(5, 0, 10), initial_phases(5, 1, 10));
}

TEST(Simulate, AutoUsesExplicitAboveCap) {
  Graph g = oracle::random_connected_graph(20, 0.2, 2);
  InteractionOperator op = make_operator(g, OperatorKind::kSymNorm);
  SimulationConfig cfg;
  cfg.runs = 2;
  cfg.seed = 1;
  cfg.times = {0.0, 0.3, 1.5};
  SimulationEnsemble exact = simulate(op, cfg);
  cfg.dense_cap = 5;
  SimulationEnsemble coarse = simulate(op, cfg);
  cfg.step = 0.02;
  SimulationEnsemble fine = simulate(op, cfg);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t ti = 0; ti < 3; ++ti) {
      EXPECT_LT(max_diff(exact.runs[r].at(ti), coarse.runs[r].at(ti)), 1e-3);
      EXPECT_LT(max_diff(exact.runs[r].at(ti), fine.runs[r].at(ti)), 1e-6);
    }
  }
}

TEST(Simulate, DisconnectedReplicatorPerComponent) {
  Graph g = oracle::make_graph(7, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {5, 3}});
  InteractionOperator op = make_operator(g, OperatorKind::kReplicator);
  SimulationConfig cfg;
  cfg.runs = 2;
  cfg.times = {0.0, 50.0};
  SimulationEnsemble ens = simulate(op, cfg);
  for (NodeId i = 0; i < 7; ++i) EXPECT_GT(ens.equilibrium_direction[i], 0.0);
  // Isolated node 6 never moves.
  EXPECT_EQ(ens.runs[0].at(1)[6], ens.runs[0].at(0)[6]);
  for (NodeId i = 0; i < 6; ++i) EXPECT_NEAR(ens.runs[0].at(1)[i], ens.equilibria[0][i], 1e-9);
}

TEST(Simulate, ConfigValidation) {
  Graph g = path3();
  InteractionOperator op = build_operator(g, OperatorKind::kLaplacian);
  SimulationConfig cfg;
  cfg.times = {0.5, 1.0};
  EXPECT_EQ(code_of([&] { simulate(op, cfg); }), ErrorCode::kConfiguration);
  cfg.times = {0.0, 1.0, 1.0};
  EXPECT_EQ(code_of([&] { simulate(op, cfg); }), ErrorCode::kConfiguration);
  cfg.times = {0.0, 1.0};
  cfg.runs = 0;
  EXPECT_EQ(code_of([&] { simulate(op, cfg); }), ErrorCode::kConfiguration);
  cfg.runs = 1;
  cfg.coupling = 0.0;
  EXPECT_EQ(code_of([&] { simulate(op, cfg); }), ErrorCode::kConfiguration);
  cfg.coupling = 1.0;
  cfg.omega = {1.0};
  EXPECT_EQ(code_of([&] { simulate(op, cfg); }), ErrorCode::kDimensionMismatch);
}

TEST(Explicit, EulerIsFirstOrder) {
  Graph g = oracle::random_connected_graph(12, 0.3, 6);
  InteractionOperator op = build_operator(g, OperatorKind::kLaplacian);
  auto theta0 = random_phases(12, 6);
  std::vector<double> times{0.0, 1.0};
  auto exact = closed_form(op, theta0, {}, 1.0, 1.0);
  const double h = 0.05 / op.spectral_upper_bound();
  const double e1 = max_diff(integrate_explicit(op, theta0, {}, 1.0, times, Integrator::kEuler, h).at(1), exact);
  const double e2 = max_diff(integrate_explicit(op, theta0, {}, 1.0, times, Integrator::kEuler, h / 2).at(1), exact);
  EXPECT_NEAR(e1 / e2, 2.0, 0.2);
  EXPECT_LT(e1, 0.05);
}

TEST(Explicit, RungeKuttaIsFourthOrder) {
  Graph g = oracle::random_connected_graph(12, 0.3, 6);
  InteractionOperator op = build_operator(g, OperatorKind::kSymNorm);
  auto theta0 = random_phases(12, 6);
  std::vector<double> times{0.0, 1.0};
  auto exact = closed_form(op, theta0, {}, 1.0, 1.0);
  const double h = 0.2;
  const double e1 = max_diff(integrate_explicit(op, theta0, {}, 1.0, times, Integrator::kRungeKutta4, h).at(1), exact);
  const double e2 = max_diff(integrate_explicit(op, theta0, {}, 1.0, times, Integrator::kRungeKutta4, h / 2).at(1), exact);
  EXPECT_NEAR(e1 / e2, 16.0, 3.0);
}

TEST(Explicit, LandsOnEveryGridPoint) {
  Graph g = path3();
  InteractionOperator op = build_operator(g, OperatorKind::kLaplacian);
  std::vector<double> theta0{1, 0, -1}, times{0.0, 0.123, 0.5, 2.0};
  Trajectory tr = integrate_explicit(op, theta0, {}, 1.0, times, Integrator::kRungeKutta4, 0.01);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    EXPECT_LT(max_diff(tr.at(ti), closed_form(op, theta0, {}, 1.0, times[ti])), 1e-8);
  }
}

TEST(Explicit, DivergenceNamesStep) {
  Graph g = oracle::random_connected_graph(10, 0.4, 2);
  InteractionOperator op = build_operator(g, OperatorKind::kLaplacian);
  auto theta0 = random_phases(10, 1);
  std::vector<double> times{0.0, 100.0};
  try {
    integrate_explicit(op, theta0, {}, 1.0, times, Integrator::kEuler, 3.0 / op.spectral_upper_bound() * 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos) << e.what();
  }
}

TEST(Explicit, EulerConservesLinearFunctionals) {
  Graph g = oracle::random_connected_graph(20, 0.15, 3);
  for (OperatorKind kind : {OperatorKind::kLaplacian, OperatorKind::kRandomWalkNorm, OperatorKind::kSymNorm,
                            OperatorKind::kReplicator, OperatorKind::kScaledAdjacency}) {
    InteractionOperator op = make_operator(g, kind);
    auto w = left_null_vector(op);
    auto theta0 = random_phases(20, 4);
    const double ts = sync_timescale(op);
    std::vector<double> times{0.0, ts, 5 * ts};
    Trajectory tr = integrate_explicit(op, theta0, {}, 1.0, times, Integrator::kEuler);
    const double w0 = dot(w, theta0);
    for (std::size_t ti = 1; ti < 3; ++ti) EXPECT_LE(std::abs(dot(w, tr.at(ti)) - w0), 1e-4 * std::abs(w0));
  }
}
