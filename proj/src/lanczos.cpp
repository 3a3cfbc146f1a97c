#include "syncomm/lanczos.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "syncomm/error.hpp"
#include "syncomm/rng.hpp"

namespace syncomm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(std::span<double> x, double a) {
  for (double& v : x) v *= a;
}

EigenPairs sorted_pairs(const LockedLanczos& solver) {
  const auto& values = solver.locked_values();
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  EigenPairs out;
  for (std::size_t idx : order) {
    out.values.push_back(values[idx]);
    out.vectors.push_back(solver.locked_vectors()[idx]);
  }
  out.report = solver.report();
  return out;
}

}  // namespace

LockedLanczos::LockedLanczos(LinearMap op, std::size_t n, LanczosOptions options)
    : op_(std::move(op)), n_(n), options_(options), rng_state_(options.seed) {}

void LockedLanczos::orthogonalize_against_locked(std::span<double> w) const {
  for (const auto& q : vectors_) axpy(-dot(q, w), q, w);
}

double LockedLanczos::true_residual(std::span<const double> x, double theta) {
  std::vector<double> ax(n_);
  op_(x, ax);
  ++report_.matvecs;
  axpy(-theta, x, ax);
  return norm(ax);
}

void LockedLanczos::lock(double value, std::vector<double> vector, double residual) {
  // Two rounds of Gram-Schmidt keep the locked set orthonormal to working
  // precision even when the Ritz vector carries a little locked content.
  for (int round = 0; round < 2; ++round) orthogonalize_against_locked(vector);
  double nv = norm(vector);
  scale(vector, 1.0 / nv);
  values_.push_back(value);
  vectors_.push_back(std::move(vector));
  report_.max_residual = std::max(report_.max_residual, residual);
}

double LockedLanczos::pass() {
  if (exhausted()) {
    throw Error(ErrorCode::kSolverNotConverged, "eigensolver: no unlocked subspace left");
  }
  ++report_.passes;
  const std::size_t free_dim = n_ - values_.size();

  std::vector<double> start(n_);
  for (int attempt = 0;; ++attempt) {
    for (double& v : start) v = 2.0 * uniform01(rng_state_) - 1.0;
    for (int round = 0; round < 2; ++round) orthogonalize_against_locked(start);
    double ns = norm(start);
    if (ns > 1e-8) {
      scale(start, 1.0 / ns);
      break;
    }
    if (attempt > 16) {
      throw Error(ErrorCode::kSolverNotConverged, "eigensolver: cannot draw a start vector");
    }
  }

  const std::size_t m_max = std::min(options_.max_basis, free_dim);
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(m_max));
  std::vector<double> alpha, beta;
  std::vector<double> w(n_);
  double last_residual = std::numeric_limits<double>::infinity();

  for (std::size_t restart = 0; restart <= options_.max_restarts; ++restart) {
    if (restart > 0) ++report_.restarts;
    alpha.clear();
    beta.clear();
    basis.col(0) = Eigen::Map<const Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(n_));
    std::size_t m = 0;
    bool invariant = false;
    for (std::size_t j = 0; j < m_max; ++j) {
      std::span<const double> vj(basis.col(static_cast<Eigen::Index>(j)).data(), n_);
      op_(vj, w);
      ++report_.matvecs;
      double a = dot(w, vj);
      alpha.push_back(a);
      axpy(-a, vj, w);
      if (j > 0) {
        std::span<const double> vprev(basis.col(static_cast<Eigen::Index>(j - 1)).data(), n_);
        axpy(-beta[j - 1], vprev, w);
      }
      for (int round = 0; round < 2; ++round) {
        orthogonalize_against_locked(w);
        for (std::size_t i = 0; i <= j; ++i) {
          std::span<const double> vi(basis.col(static_cast<Eigen::Index>(i)).data(), n_);
          axpy(-dot(vi, w), vi, w);
        }
      }
      double b = norm(w);
      m = j + 1;
      if (b <= options_.breakdown_tol || m == free_dim) {
        invariant = true;
        break;
      }
      beta.push_back(b);
      if (m == m_max) break;
      basis.col(static_cast<Eigen::Index>(m)) =
          Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n_)) / b;
    }

    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(),
                                                             static_cast<Eigen::Index>(m));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(m > 0 ? m - 1 : 0));
    for (std::size_t i = 0; i + 1 < m; ++i) sub[static_cast<Eigen::Index>(i)] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (tri.info() != Eigen::Success) {
      throw Error(ErrorCode::kSolverNotConverged, "eigensolver: tridiagonal solve failed");
    }
    const Eigen::VectorXd& theta = tri.eigenvalues();
    const Eigen::MatrixXd& y = tri.eigenvectors();
    const double tail = invariant ? 0.0 : beta.back();
    auto leading = basis.leftCols(static_cast<Eigen::Index>(m));

    auto ritz_vector = [&](Eigen::Index i) {
      Eigen::VectorXd x = leading * y.col(i);
      return std::vector<double>(x.data(), x.data() + x.size());
    };

    std::vector<double> x0 = ritz_vector(0);
    double r0 = true_residual(x0, theta[0]);
    last_residual = r0;
    if (r0 <= options_.residual_tol) {
      lock(theta[0], std::move(x0), r0);
      for (Eigen::Index i = 1; i < theta.size(); ++i) {
        if (std::abs(tail * y(static_cast<Eigen::Index>(m) - 1, i)) > 0.1 * options_.residual_tol)
          break;
        std::vector<double> xi = ritz_vector(i);
        double ri = true_residual(xi, theta[i]);
        if (ri > options_.residual_tol) break;
        lock(theta[i], std::move(xi), ri);
      }
      return theta[0];
    }
    for (int round = 0; round < 2; ++round) orthogonalize_against_locked(x0);
    double nx = norm(x0);
    scale(x0, 1.0 / nx);
    start = std::move(x0);
  }
  throw Error(ErrorCode::kSolverNotConverged,
              "eigensolver: no convergence after " + std::to_string(options_.max_restarts) +
                  " restarts (residual " + std::to_string(last_residual) + ")");
}

EigenPairs lanczos_smallest(const LinearMap& op, std::size_t n, std::size_t k,
                            const LanczosOptions& options) {
  if (k > n) {
    throw Error(ErrorCode::kConfiguration, "requested " + std::to_string(k) +
                                               " eigenvalues of a size-" + std::to_string(n) +
                                               " operator");
  }
  LockedLanczos solver(op, n, options);
  // Copies of a degenerate eigenvalue are within this of each other.
  const double same = std::max(100.0 * options.residual_tol, 1e-12);
  while (k > 0 && !solver.exhausted()) {
    std::vector<double> before = solver.locked_values();
    std::sort(before.begin(), before.end());
    double smallest_remaining = solver.pass();
    if (before.size() >= k && smallest_remaining > before[k - 1] + same) break;
  }
  EigenPairs all = sorted_pairs(solver);
  all.values.resize(k);
  all.vectors.resize(k);
  return all;
}

EigenPairs lanczos_through(const LinearMap& op, std::size_t n, double threshold,
                           const LanczosOptions& options) {
  LockedLanczos solver(op, n, options);
  while (!solver.exhausted()) {
    if (solver.pass() > threshold) break;
  }
  EigenPairs all = sorted_pairs(solver);
  auto above = std::upper_bound(all.values.begin(), all.values.end(), threshold);
  std::size_t keep = static_cast<std::size_t>(above - all.values.begin());
  if (above != all.values.end()) ++keep;
  all.values.resize(keep);
  all.vectors.resize(keep);
  return all;
}

}  // namespace syncomm
