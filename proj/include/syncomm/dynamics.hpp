#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "syncomm/operators.hpp"

namespace syncomm {

enum class Integrator {
  kAuto,        // closed form up to the dense cap, RK4 above it
  kClosedForm,  // dense eigendecomposition
  kEuler,       // forward Euler
  kRungeKutta4, // classical fourth-order Runge-Kutta
};

std::string_view to_string(Integrator method);
Integrator parse_integrator(std::string_view name);

struct SimulationConfig {
  double coupling = 1.0;
  std::vector<double> omega;  // empty means all zeros
  std::size_t runs = 100;
  std::vector<double> times;  // strictly ascending, first entry 0
  std::uint64_t seed = 0;
  Integrator method = Integrator::kAuto;
  /// Explicit step; defaults to 0.5 / (c · spectral upper bound).
  std::optional<double> step;
  std::size_t dense_cap = 2048;
};

void validate(const SimulationConfig& cfg, std::size_t node_count);

/// Phases of one run sampled on the time grid, row-major (time × node).
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t time_count, std::size_t node_count)
      : nodes_(node_count), data_(time_count * node_count, 0.0) {}

  std::size_t node_count() const { return nodes_; }
  std::size_t time_count() const { return nodes_ == 0 ? 0 : data_.size() / nodes_; }
  std::span<const double> at(std::size_t time_index) const {
    return {data_.data() + time_index * nodes_, nodes_};
  }
  std::span<double> at(std::size_t time_index) {
    return {data_.data() + time_index * nodes_, nodes_};
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::size_t nodes_ = 0;
  std::vector<double> data_;
};

struct SimulationEnsemble {
  SimulationConfig config;
  OperatorKind kind = OperatorKind::kLaplacian;
  double alpha = 0.0;
  AlphaSource alpha_source = AlphaSource::kNone;
  std::vector<Trajectory> runs;
  /// Per-run θ^eq; empty when ω ≠ 0 or the operator has no steady state.
  std::vector<std::vector<double>> equilibria;
  /// Run-independent steady-state shape used for similarity ratios; all
  /// zeros when the equilibrium is trivial.
  std::vector<double> equilibrium_direction;

  std::size_t node_count() const { return equilibrium_direction.size(); }
  const std::vector<double>& times() const { return config.times; }
  /// Index of `t` on the grid (relative tolerance 1e-12).
  std::optional<std::size_t> time_index(double t) const;
};

/// θ₀ of run `run`: uniform on [−π, π), drawn from a stream derived from the
/// master seed and the run index.
std::vector<double> initial_phases(std::uint64_t seed, std::size_t run, std::size_t node_count);

/// K independent runs of dθ/dt = ω − c·op·θ sampled on the time grid.
///
/// Operators whose α tracks λ_max are simulated per connected component with
/// each component's own λ_max; everything else is simulated whole.
SimulationEnsemble simulate(const InteractionOperator& op, const SimulationConfig& cfg);

/// Exact propagator built from a dense eigendecomposition of the operator
/// (of its symmetric form for RandomWalkNorm).
class ClosedFormSolver {
 public:
  explicit ClosedFormSolver(const InteractionOperator& op, std::size_t dense_cap = 2048);

  /// θ(t) = (θ₀ − u)·e^{−c·op·t} + u with u = (c·op)⁻¹ω; ω may be empty.
  std::vector<double> evaluate(std::span<const double> theta0, std::span<const double> omega,
                               double coupling, double t) const;
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

 private:
  std::size_t n_;
  double zero_tol_;
  std::vector<double> eigenvalues_;
  std::vector<double> eigenvectors_;  // column-major n × n
  std::vector<double> similarity_;    // P = D^{1/2} for RandomWalkNorm, else empty
};

std::vector<double> closed_form(const InteractionOperator& op, std::span<const double> theta0,
                                std::span<const double> omega, double coupling, double t);

/// Explicit fixed-step integration sampled on `times`. Steps shrink to land
/// on every grid point. Throws on divergence (‖θ‖ above 1e6·‖θ₀‖) except for
/// Modularity, whose indefinite spectrum grows by construction.
Trajectory integrate_explicit(const InteractionOperator& op, std::span<const double> theta0,
                              std::span<const double> omega, double coupling,
                              std::span<const double> times, Integrator method,
                              std::optional<double> step = std::nullopt);

/// Default explicit step 0.5 / (c · spectral upper bound).
double default_step(const InteractionOperator& op, double coupling);

/// lim θ(t) for ω = 0, per connected component:
///   Laplacian      mean(θ₀) on every node
///   RandomWalkNorm ∝ degree, Σθ conserved
///   SymNorm        ∝ √degree, √dᵀθ conserved
///   Replicator / ScaledAdjacency at α = λ_max: ∝ dominant eigenvector v,
///                  scaled by vᵀθ₀ / vᵀv; α > λ_max gives zero
std::vector<double> steady_state(const InteractionOperator& op, std::span<const double> theta0);

/// Overload rejecting nonzero ω with kNotImplemented.
std::vector<double> steady_state(const InteractionOperator& op, std::span<const double> theta0,
                                 std::span<const double> omega);

}  // namespace syncomm
