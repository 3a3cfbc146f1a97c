#include "syncomm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "syncomm/error.hpp"

namespace syncomm {

namespace {

LanczosOptions options_for(double scale, std::size_t k) {
  LanczosOptions opt;
  opt.residual_tol = 1e-10 * std::max(1.0, scale);
  opt.breakdown_tol = 1e-13 * std::max(1.0, scale);
  opt.max_basis = std::max<std::size_t>(120, 2 * k + 40);
  return opt;
}

// Symmetric operator whose spectrum equals op's.
struct SymmetricForm {
  std::optional<InteractionOperator> sym;  // set for RandomWalkNorm only
  const InteractionOperator* op;

  explicit SymmetricForm(const InteractionOperator& o) : op(&o) {
    if (o.kind() == OperatorKind::kRandomWalkNorm) {
      sym.emplace(o.graph(), OperatorKind::kSymNorm, std::nullopt);
    }
  }
  const InteractionOperator& get() const { return sym ? *sym : *op; }
  LinearMap map() const {
    const InteractionOperator* target = &get();
    return [target](std::span<const double> x, std::span<double> y) { target->apply(x, y); };
  }
  // Maps eigenvectors of the symmetric form back to op's eigenvectors.
  void lift(std::vector<double>& v) const {
    if (!sym) return;
    const Graph& g = op->graph();
    double nrm = 0.0;
    for (NodeId i = 0; i < v.size(); ++i) {
      v[i] *= std::sqrt(static_cast<double>(g.degree(i)));
      nrm += v[i] * v[i];
    }
    nrm = std::sqrt(nrm);
    for (double& x : v) x /= nrm;
  }
};

Spectrum to_spectrum(const InteractionOperator& op, const SymmetricForm& form, EigenPairs pairs,
                     bool with_vectors) {
  Spectrum s;
  s.kind = op.kind();
  s.alpha = op.alpha();
  s.values = std::move(pairs.values);
  s.report = pairs.report;
  if (with_vectors) {
    s.vectors = std::move(pairs.vectors);
    for (auto& v : s.vectors) form.lift(v);
  }
  return s;
}

}  // namespace

DominantPair lambda_max_adjacency(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) throw Error(ErrorCode::kEmptyGraph, "lambda_max of an empty graph");
  LinearMap neg_adjacency = [&g](std::span<const double> x, std::span<double> y) {
    for (NodeId i = 0; i < g.node_count(); ++i) {
      double s = 0.0;
      for (NodeId j : g.neighbors(i)) s += x[j];
      y[i] = -s;
    }
  };
  LanczosOptions opt = options_for(0.0, 1);
  LockedLanczos solver(neg_adjacency, n, opt);
  double lowest = solver.pass();
  // The pass may lock several pairs; the one it returns is the smallest.
  const auto& values = solver.locked_values();
  std::size_t idx = static_cast<std::size_t>(
      std::find(values.begin(), values.end(), lowest) - values.begin());

  DominantPair out;
  out.value = -lowest;
  out.vector = solver.locked_vectors()[idx];
  if (std::accumulate(out.vector.begin(), out.vector.end(), 0.0) < 0.0) {
    for (double& x : out.vector) x = -x;
  }
  std::vector<double> av(n);
  neg_adjacency(out.vector, av);
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) r += (av[i] + out.value * out.vector[i]) * (av[i] + out.value * out.vector[i]);
  out.residual = std::sqrt(r);
  if (out.residual > 1e-9) {
    throw Error(ErrorCode::kSolverNotConverged,
                "lambda_max residual " + std::to_string(out.residual) + " above 1e-9");
  }
  return out;
}

InteractionOperator make_operator(const Graph& g, OperatorKind kind,
                                  std::optional<double> alpha) {
  if (requires_alpha(kind) && !alpha) {
    return InteractionOperator(g, kind, lambda_max_adjacency(g).value, AlphaSource::kLambdaMax);
  }
  return build_operator(g, kind, alpha);
}

Spectrum smallest_eigenvalues(const InteractionOperator& op, std::size_t k, bool with_vectors) {
  SymmetricForm form(op);
  EigenPairs pairs = lanczos_smallest(form.map(), op.size(), k,
                                      options_for(op.spectral_upper_bound(), k));
  return to_spectrum(op, form, std::move(pairs), with_vectors);
}

Spectrum eigenvalues_through(const InteractionOperator& op, double threshold) {
  SymmetricForm form(op);
  EigenPairs pairs =
      lanczos_through(form.map(), op.size(), threshold, options_for(op.spectral_upper_bound(), 1));
  return to_spectrum(op, form, std::move(pairs), false);
}

double default_zero_tolerance(const InteractionOperator& op) {
  return 1e-8 * op.spectral_upper_bound();
}

std::size_t count_zero_eigenvalues(const InteractionOperator& op, std::optional<double> tol) {
  const double zero = tol.value_or(default_zero_tolerance(op));
  Spectrum s = eigenvalues_through(op, zero);
  return static_cast<std::size_t>(
      std::count_if(s.values.begin(), s.values.end(), [&](double v) { return std::abs(v) <= zero; }));
}

double smallest_positive_eigenvalue(const InteractionOperator& op) {
  const double zero = default_zero_tolerance(op);
  Spectrum s = eigenvalues_through(op, zero);
  if (s.values.empty() || s.values.back() <= zero) {
    throw Error(ErrorCode::kSolverNotConverged, "operator has no positive eigenvalue");
  }
  return s.values.back();
}

double sync_timescale(const InteractionOperator& op) {
  if (connected_components(op.graph()).community_count() != 1) {
    throw Error(ErrorCode::kDisconnected,
                "sync timescale is defined per connected component; split the graph first");
  }
  return 1.0 / smallest_positive_eigenvalue(op);
}

}  // namespace syncomm
