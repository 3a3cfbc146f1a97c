#include "syncomm/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <numbers>
#include <string>

#include "syncomm/error.hpp"
#include "syncomm/rng.hpp"
#include "syncomm/spectral.hpp"

namespace syncomm {

namespace {

constexpr double kAlphaMatchTol = 1e-8;
constexpr double kDivergenceFactor = 1e6;

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// One connected piece of the dynamics. Units of block-diagonal operators
// evolve independently, so each gets its own operator and null vectors.
struct Unit {
  std::vector<NodeId> nodes;  // parent indices, ascending
  std::unique_ptr<Subgraph> sub;
  std::optional<InteractionOperator> op;  // absent for frozen singletons
  std::vector<double> right;              // steady-state direction; empty if trivial
  std::vector<double> left;               // conserved functional
  bool has_steady = true;
};

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

void fill_null_vectors(Unit& u) {
  const InteractionOperator& op = *u.op;
  const Graph& g = op.graph();
  const std::size_t n = g.node_count();
  switch (op.kind()) {
    case OperatorKind::kLaplacian:
      u.right = u.left = ones(n);
      return;
    case OperatorKind::kRandomWalkNorm:
      u.left = ones(n);
      u.right.resize(n);
      for (NodeId i = 0; i < n; ++i) u.right[i] = static_cast<double>(g.degree(i));
      return;
    case OperatorKind::kSymNorm:
      u.right.resize(n);
      for (NodeId i = 0; i < n; ++i) u.right[i] = std::sqrt(static_cast<double>(g.degree(i)));
      u.left = u.right;
      return;
    case OperatorKind::kReplicator:
    case OperatorKind::kScaledAdjacency: {
      DominantPair dom = lambda_max_adjacency(g);
      const double slack = kAlphaMatchTol * std::max(1.0, dom.value);
      if (op.alpha() > dom.value + slack) {
        u.right.clear();
        u.left.clear();
        return;
      }
      if (op.alpha() < dom.value - slack) {
        throw Error(ErrorCode::kConfiguration,
                    "alpha " + std::to_string(op.alpha()) + " is below lambda_max " +
                        std::to_string(dom.value) + ": no steady state exists");
      }
      u.right = dom.vector;
      u.left = dom.vector;
      return;
    }
    case OperatorKind::kModularity:
      u.right = u.left = ones(n);
      u.has_steady = false;
      return;
  }
}

std::vector<Unit> decompose(const InteractionOperator& op) {
  std::vector<Unit> units;
  const Graph& g = op.graph();
  Partition comps = connected_components(g);
  if (op.kind() == OperatorKind::kModularity || comps.community_count() == 1) {
    Unit u;
    u.nodes.resize(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) u.nodes[i] = i;
    u.op.emplace(op);
    fill_null_vectors(u);
    units.push_back(std::move(u));
    return units;
  }
  const bool spectral_alpha = op.alpha_source() == AlphaSource::kLambdaMax;
  for (auto& members : comps.groups()) {
    Unit u;
    u.nodes = std::move(members);
    if (spectral_alpha && u.nodes.size() == 1) {
      // λ_max of a lone node is 0: the operator vanishes and θ stays put.
      u.right = u.left = ones(1);
      units.push_back(std::move(u));
      continue;
    }
    u.sub = std::make_unique<Subgraph>(induced_subgraph(g, u.nodes));
    if (spectral_alpha) {
      u.op.emplace(make_operator(u.sub->graph, op.kind()));
    } else {
      u.op.emplace(op.rebind(u.sub->graph, requires_alpha(op.kind())
                                               ? std::optional<double>(op.alpha())
                                               : std::nullopt));
    }
    fill_null_vectors(u);
    units.push_back(std::move(u));
  }
  return units;
}

std::vector<double> gather(std::span<const double> full, const std::vector<NodeId>& nodes) {
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = full[nodes[i]];
  return out;
}

void project_steady(const Unit& u, std::span<const double> theta0_unit, std::span<double> out) {
  if (u.right.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.right.size(); ++i) {
    num += u.left[i] * theta0_unit[i];
    den += u.left[i] * u.right[i];
  }
  const double s = num / den;
  for (std::size_t i = 0; i < u.right.size(); ++i) out[i] = u.right[i] * s;
}

std::vector<double> unit_direction(const Unit& u) {
  if (u.right.empty()) return std::vector<double>(u.nodes.size(), 0.0);
  double s = 0.0;
  for (double x : u.right) s += x;
  std::vector<double> d(u.right);
  for (double& x : d) x /= s;
  return d;
}

}  // namespace

std::string_view to_string(Integrator method) {
  switch (method) {
    case Integrator::kAuto: return "auto";
    case Integrator::kClosedForm: return "closed";
    case Integrator::kEuler: return "euler";
    case Integrator::kRungeKutta4: return "rk4";
  }
  return "auto";
}

Integrator parse_integrator(std::string_view name) {
  if (name == "auto") return Integrator::kAuto;
  if (name == "closed" || name == "closed-form") return Integrator::kClosedForm;
  if (name == "euler") return Integrator::kEuler;
  if (name == "rk4") return Integrator::kRungeKutta4;
  throw Error(ErrorCode::kConfiguration,
              "unknown method '" + std::string(name) + "' (expected auto, closed, euler or rk4)");
}

void validate(const SimulationConfig& cfg, std::size_t node_count) {
  if (!(cfg.coupling > 0.0) || !std::isfinite(cfg.coupling)) {
    throw Error(ErrorCode::kConfiguration, "coupling must be finite and positive");
  }
  if (cfg.runs == 0) throw Error(ErrorCode::kConfiguration, "need at least one run");
  if (cfg.times.empty() || cfg.times.front() != 0.0) {
    throw Error(ErrorCode::kConfiguration, "time grid must start at 0");
  }
  for (std::size_t i = 1; i < cfg.times.size(); ++i) {
    if (!(cfg.times[i] > cfg.times[i - 1]) || !std::isfinite(cfg.times[i])) {
      throw Error(ErrorCode::kConfiguration, "time grid must be strictly ascending and finite");
    }
  }
  if (!cfg.omega.empty() && cfg.omega.size() != node_count) {
    throw Error(ErrorCode::kDimensionMismatch, "omega has " + std::to_string(cfg.omega.size()) +
                                                   " entries for " +
                                                   std::to_string(node_count) + " nodes");
  }
  if (cfg.step && !(*cfg.step > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "step must be positive");
  }
}

std::optional<std::size_t> SimulationEnsemble::time_index(double t) const {
  const auto& grid = config.times;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  }
  return std::nullopt;
}

std::vector<double> initial_phases(std::uint64_t seed, std::size_t run, std::size_t node_count) {
  std::uint64_t state = derive_seed(seed, run);
  std::vector<double> theta(node_count);
  for (double& x : theta) x = -std::numbers::pi + 2.0 * std::numbers::pi * uniform01(state);
  return theta;
}

ClosedFormSolver::ClosedFormSolver(const InteractionOperator& op, std::size_t dense_cap)
    : n_(op.size()), zero_tol_(default_zero_tolerance(op)) {
  if (n_ > dense_cap) {
    throw Error(ErrorCode::kSizeCap, "closed form needs a dense " + std::to_string(n_) + "x" +
                                         std::to_string(n_) + " matrix; cap is " +
                                         std::to_string(dense_cap));
  }
  std::optional<InteractionOperator> sym;
  if (op.kind() == OperatorKind::kRandomWalkNorm) {
    sym.emplace(op.graph(), OperatorKind::kSymNorm, std::nullopt);
    similarity_.resize(n_);
    for (NodeId i = 0; i < n_; ++i) {
      similarity_[i] = std::sqrt(static_cast<double>(op.graph().degree(i)));
    }
  }
  const InteractionOperator& form = sym ? *sym : op;

  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd dense(n, n);
  std::vector<double> unit(n_, 0.0), col(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    unit[j] = 1.0;
    form.apply_serial(unit, col);
    unit[j] = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
  }
  // Symmetrize away rounding asymmetry of the normalized forms.
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolverNotConverged, "dense eigendecomposition failed");
  }
  eigenvalues_.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  eigenvectors_.assign(es.eigenvectors().data(), es.eigenvectors().data() + n * n);
}

std::vector<double> ClosedFormSolver::evaluate(std::span<const double> theta0,
                                               std::span<const double> omega, double coupling,
                                               double t) const {
  if (theta0.size() != n_ || (!omega.empty() && omega.size() != n_)) {
    throw Error(ErrorCode::kDimensionMismatch, "closed form: vector size mismatch");
  }
  std::vector<double> result(theta0.begin(), theta0.end());
  if (t == 0.0) return result;

  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::Map<const Eigen::MatrixXd> X(eigenvectors_.data(), n, n);
  Eigen::Map<const Eigen::VectorXd> lambda(eigenvalues_.data(), n);

  auto to_basis = [&](std::span<const double> v) {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    if (!similarity_.empty()) {
      for (Eigen::Index i = 0; i < n; ++i) w[i] /= similarity_[static_cast<std::size_t>(i)];
    }
    return Eigen::VectorXd(X.transpose() * w);
  };
  auto from_basis = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd v = X * c;
    if (!similarity_.empty()) {
      for (Eigen::Index i = 0; i < n; ++i) v[i] *= similarity_[static_cast<std::size_t>(i)];
    }
    return v;
  };

  const bool forced = !omega.empty() && !all_zero(omega);
  Eigen::VectorXd shift_coeffs = Eigen::VectorXd::Zero(n);
  if (forced) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(lambda[i]) <= zero_tol_) {
        throw Error(ErrorCode::kSingularOperator,
                    "closed form with nonzero omega needs an invertible operator");
      }
    }
    shift_coeffs = to_basis(omega).array() / (coupling * lambda.array());
  }
  Eigen::VectorXd coeffs = to_basis(theta0) - shift_coeffs;
  for (Eigen::Index i = 0; i < n; ++i) coeffs[i] *= std::exp(-coupling * lambda[i] * t);
  Eigen::VectorXd theta = from_basis(coeffs + shift_coeffs);
  for (std::size_t i = 0; i < n_; ++i) result[i] = theta[static_cast<Eigen::Index>(i)];
  return result;
}

std::vector<double> closed_form(const InteractionOperator& op, std::span<const double> theta0,
                                std::span<const double> omega, double coupling, double t) {
  return ClosedFormSolver(op).evaluate(theta0, omega, coupling, t);
}

double default_step(const InteractionOperator& op, double coupling) {
  return 0.5 / (coupling * std::max(op.spectral_upper_bound(), 1e-12));
}

Trajectory integrate_explicit(const InteractionOperator& op, std::span<const double> theta0,
                              std::span<const double> omega, double coupling,
                              std::span<const double> times, Integrator method,
                              std::optional<double> step) {
  if (method != Integrator::kEuler && method != Integrator::kRungeKutta4) {
    throw Error(ErrorCode::kConfiguration, "explicit integration needs euler or rk4");
  }
  const std::size_t n = op.size();
  if (theta0.size() != n || (!omega.empty() && omega.size() != n)) {
    throw Error(ErrorCode::kDimensionMismatch, "explicit integration: vector size mismatch");
  }
  const double h_max = step.value_or(default_step(op, coupling));
  const bool check_growth = op.kind() != OperatorKind::kModularity;
  const double limit = kDivergenceFactor * std::max(norm2(theta0), 1e-300);

  std::vector<double> theta(theta0.begin(), theta0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto rhs = [&](std::span<const double> x, std::span<double> out) {
    op.apply(x, out);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = (omega.empty() ? 0.0 : omega[i]) - coupling * out[i];
    }
  };

  Trajectory traj(times.size(), n);
  double now = 0.0;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double span_t = times[ti] - now;
    if (span_t > 0.0) {
      const auto steps = static_cast<std::size_t>(std::ceil(span_t / h_max - 1e-9));
      const double h = span_t / static_cast<double>(std::max<std::size_t>(steps, 1));
      for (std::size_t s = 0; s < steps; ++s) {
        if (method == Integrator::kEuler) {
          rhs(theta, k1);
          for (std::size_t i = 0; i < n; ++i) theta[i] += h * k1[i];
        } else {
          rhs(theta, k1);
          for (std::size_t i = 0; i < n; ++i) tmp[i] = theta[i] + 0.5 * h * k1[i];
          rhs(tmp, k2);
          for (std::size_t i = 0; i < n; ++i) tmp[i] = theta[i] + 0.5 * h * k2[i];
          rhs(tmp, k3);
          for (std::size_t i = 0; i < n; ++i) tmp[i] = theta[i] + h * k3[i];
          rhs(tmp, k4);
          for (std::size_t i = 0; i < n; ++i) {
            theta[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
          }
        }
        if (check_growth && (s % 64 == 63 || s + 1 == steps)) {
          double nrm = norm2(theta);
          if (!(nrm <= limit)) {
            throw Error(ErrorCode::kDivergence,
                        std::string(to_string(method)) + " integration diverged with step " +
                            std::to_string(h) + "; reduce the step below " +
                            std::to_string(2.0 / (coupling * op.spectral_upper_bound())));
          }
        }
      }
      now = times[ti];
    }
    std::copy(theta.begin(), theta.end(), traj.at(ti).begin());
  }
  return traj;
}

std::vector<double> steady_state(const InteractionOperator& op, std::span<const double> theta0) {
  if (theta0.size() != op.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "steady state: vector size mismatch");
  }
  if (op.kind() == OperatorKind::kModularity) {
    throw Error(ErrorCode::kNotImplemented,
                "modularity operator is indefinite and has no steady state");
  }
  std::vector<Unit> units = decompose(op);
  std::vector<double> out(op.size(), 0.0);
  for (const Unit& u : units) {
    std::vector<double> local = gather(theta0, u.nodes);
    std::vector<double> eq(u.nodes.size());
    project_steady(u, local, eq);
    for (std::size_t i = 0; i < u.nodes.size(); ++i) out[u.nodes[i]] = eq[i];
  }
  return out;
}

std::vector<double> steady_state(const InteractionOperator& op, std::span<const double> theta0,
                                 std::span<const double> omega) {
  if (!all_zero(omega)) {
    throw Error(ErrorCode::kNotImplemented, "steady states with nonzero omega are not supported");
  }
  return steady_state(op, theta0);
}

SimulationEnsemble simulate(const InteractionOperator& op, const SimulationConfig& cfg) {
  const std::size_t n = op.size();
  validate(cfg, n);
  std::vector<Unit> units = decompose(op);

  std::vector<Integrator> methods(units.size());
  std::vector<std::unique_ptr<ClosedFormSolver>> solvers(units.size());
  for (std::size_t k = 0; k < units.size(); ++k) {
    if (!units[k].op) continue;
    Integrator m = cfg.method;
    if (m == Integrator::kAuto) {
      m = units[k].nodes.size() <= cfg.dense_cap ? Integrator::kClosedForm
                                                 : Integrator::kRungeKutta4;
    }
    methods[k] = m;
    if (m == Integrator::kClosedForm) {
      solvers[k] = std::make_unique<ClosedFormSolver>(*units[k].op, cfg.dense_cap);
    }
  }

  SimulationEnsemble ens;
  ens.config = cfg;
  ens.kind = op.kind();
  ens.alpha = op.alpha();
  ens.alpha_source = op.alpha_source();
  ens.equilibrium_direction.assign(n, 0.0);
  for (const Unit& u : units) {
    std::vector<double> d = unit_direction(u);
    for (std::size_t i = 0; i < u.nodes.size(); ++i) ens.equilibrium_direction[u.nodes[i]] = d[i];
  }

  const bool forced = !cfg.omega.empty() && !all_zero(cfg.omega);
  const bool with_equilibria = !forced && op.kind() != OperatorKind::kModularity;
  ens.runs.assign(cfg.runs, Trajectory(cfg.times.size(), n));
  if (with_equilibria) ens.equilibria.assign(cfg.runs, std::vector<double>(n, 0.0));

  std::vector<std::exception_ptr> failures(cfg.runs);
  const auto run_count = static_cast<std::ptrdiff_t>(cfg.runs);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < run_count; ++r) {
    const auto run = static_cast<std::size_t>(r);
    try {
      std::vector<double> theta0 = initial_phases(cfg.seed, run, n);
      Trajectory& traj = ens.runs[run];
      for (std::size_t k = 0; k < units.size(); ++k) {
        const Unit& u = units[k];
        std::vector<double> local0 = gather(theta0, u.nodes);
        std::vector<double> local_omega =
            cfg.omega.empty() ? std::vector<double>{} : gather(cfg.omega, u.nodes);
        if (!u.op) {
          for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
            for (std::size_t i = 0; i < u.nodes.size(); ++i) {
              traj.at(ti)[u.nodes[i]] = local0[i] +
                  (local_omega.empty() ? 0.0 : local_omega[i] * cfg.times[ti]);
            }
          }
        } else if (methods[k] == Integrator::kClosedForm) {
          for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
            std::vector<double> th =
                solvers[k]->evaluate(local0, local_omega, cfg.coupling, cfg.times[ti]);
            for (std::size_t i = 0; i < u.nodes.size(); ++i) traj.at(ti)[u.nodes[i]] = th[i];
          }
        } else {
          Trajectory part = integrate_explicit(*u.op, local0, local_omega, cfg.coupling,
                                               cfg.times, methods[k], cfg.step);
          for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
            for (std::size_t i = 0; i < u.nodes.size(); ++i) {
              traj.at(ti)[u.nodes[i]] = part.at(ti)[i];
            }
          }
        }
        if (with_equilibria) {
          std::vector<double> eq(u.nodes.size());
          project_steady(u, local0, eq);
          for (std::size_t i = 0; i < u.nodes.size(); ++i) {
            ens.equilibria[run][u.nodes[i]] = eq[i];
          }
        }
      }
    } catch (...) {
      failures[run] = std::current_exception();
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return ens;
}

}  // namespace syncomm
