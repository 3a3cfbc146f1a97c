#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace syncomm {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct LanczosOptions {
  /// Absolute bound on ‖Ax − θx‖₂ for a Ritz pair to be locked.
  double residual_tol = 1e-10;
  /// Off-diagonal magnitude treated as an invariant subspace.
  double breakdown_tol = 1e-13;
  std::size_t max_basis = 120;
  std::size_t max_restarts = 400;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct SolverReport {
  std::size_t passes = 0;
  std::size_t restarts = 0;
  std::size_t matvecs = 0;
  double max_residual = 0.0;
};

/// Symmetric Lanczos with full reorthogonalization, explicit restarts and
/// locking.
///
/// Each pass starts from a random vector orthogonal to everything locked so
/// far and iterates until the smallest Ritz pair of that restricted problem
/// meets the residual bound. Converged pairs are locked, so later passes see
/// the operator deflated to the orthogonal complement. Repeated passes thus
/// recover degenerate eigenvalues one copy at a time.
class LockedLanczos {
 public:
  LockedLanczos(LinearMap op, std::size_t n, LanczosOptions options = {});

  /// Runs one pass and returns the smallest eigenvalue found in the unlocked
  /// subspace. Throws when the pass exhausts its restarts.
  double pass();

  bool exhausted() const { return values_.size() >= n_; }
  std::size_t locked_count() const { return values_.size(); }
  const std::vector<double>& locked_values() const { return values_; }
  const std::vector<std::vector<double>>& locked_vectors() const { return vectors_; }
  const SolverReport& report() const { return report_; }

 private:
  void orthogonalize_against_locked(std::span<double> w) const;
  void lock(double value, std::vector<double> vector, double residual);
  double true_residual(std::span<const double> x, double theta);

  LinearMap op_;
  std::size_t n_;
  LanczosOptions options_;
  std::uint64_t rng_state_;
  std::vector<double> values_;
  std::vector<std::vector<double>> vectors_;
  SolverReport report_;
};

struct EigenPairs {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // unit 2-norm, aligned with values
  SolverReport report;
};

/// The k algebraically smallest eigenpairs of a symmetric map.
EigenPairs lanczos_smallest(const LinearMap& op, std::size_t n, std::size_t k,
                            const LanczosOptions& options = {});

/// Every eigenpair with value ≤ threshold, plus the smallest value above it
/// (when one exists) as the final entry.
EigenPairs lanczos_through(const LinearMap& op, std::size_t n, double threshold,
                           const LanczosOptions& options = {});

}  // namespace syncomm
