#include "eigenbound/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "eigenbound/assembly.hpp"
#include "eigenbound/errors.hpp"

namespace eigenbound {

std::vector<double> compute_indicators(const ProblemSpec& spec, const EigenApprox& eig,
                                       const FluxField& q) {
  const ResidualPieces p = residual_pieces(spec, eig, q);
  const double lambda = eig.lambda1;
  const double rho = spec.rho;
  std::vector<double> eta(p.flux_sq.size());
  if (spec.kind == ProblemKind::Trace) {
    if (!spec.friedrichs_upper.has_value())
      throw ConfigError("indicators: trace kind needs a certified domain constant");
    const double cf = *spec.friedrichs_upper;
    const double sig = spec.sigma;
    const double w1 = (1.0 + 1.0 / rho) * (1.0 + 1.0 / sig);
    const double w2 = (1.0 + rho) * (1.0 + 1.0 / sig) * cf * cf;
    const double w3 = (1.0 + sig) / lambda;
    for (std::size_t i = 0; i < eta.size(); ++i)
      eta[i] = std::sqrt(w1 * p.flux_sq[i] + w2 * p.scalar_sq[i] + w3 * p.edge_sq[i]);
  } else {
    const double w1 = 1.0 + 1.0 / rho;
    const double w2 = (1.0 + rho) / lambda;
    for (std::size_t i = 0; i < eta.size(); ++i)
      eta[i] = std::sqrt(w1 * p.flux_sq[i] + w2 * p.scalar_sq[i]);
  }
  return eta;
}

std::vector<int> bulk_mark(const std::vector<double>& indicators, double theta) {
  if (!(theta > 0.0) || !(theta <= 1.0))
    throw ArgumentError("bulk mark: theta must lie in (0, 1]");
  double total = 0.0;
  for (double e : indicators) {
    if (!(e >= 0.0) || !std::isfinite(e))
      throw ArgumentError("bulk mark: indicators must be finite and nonnegative");
    total += e * e;
  }
  if (total == 0.0) return {};
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (indicators[a] != indicators[b]) return indicators[a] > indicators[b];
    return a < b;
  });
  const double target = theta * theta * total;
  std::vector<int> marked;
  double acc = 0.0;
  for (int id : order) {
    marked.push_back(id);
    acc += indicators[id] * indicators[id];
    if (acc >= target) break;
  }
  return marked;
}

std::string run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::IterationCap: return "iteration-cap";
    case RunStatus::CertificateFailure: return "certificate-failure";
  }
  return "unknown";
}

AdaptResult run_adaptive(const ProblemSpec& spec0, const IterationObserver& observer) {
  ProblemSpec spec = spec0;  // working copy; the mesh evolves across iterations
  spec.validate();

  constexpr int kMaxIterations = 40;
  constexpr int kCertificateStrikes = 3;

  AdaptResult out;
  out.history.status = RunStatus::IterationCap;
  int strikes = 0;
  bool have_bounds = false;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const auto tick = std::chrono::steady_clock::now();

    const SparseSymMatrix K = assemble_energy_matrix(spec.mesh, spec.coefficients);
    const SparseSymMatrix M = assemble_target_matrix(spec.mesh, spec.kind);
    const ReducedSystem red = eliminate_dirichlet(K, M, spec.mesh);

    EigenApprox eig;
    if (spec.kind == ProblemKind::Poincare) {
      // the energy matrix is singular on constants; keep the iteration
      // orthogonal to them
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(red.K.dim());
      eig = smallest_eigenpairs(red.K, red.M, 2, &ones);
    } else {
      eig = smallest_eigenpairs(red.K, red.M, 2);
    }
    eig.vertex1 = prolong_to_vertices(eig.vector1, red.dofs);

    const FluxSpace space = build_flux_space(spec.mesh, spec.kind);
    const FluxSystem sys = assemble_flux_system(space, spec, eig);
    const FluxField q{&space, solve_spd(sys.matrix, sys.rhs)};

    const std::vector<double> indicators = compute_indicators(spec, eig, q);
    const ResidualNorms norms = compute_residual_norms(spec, eig, q);

    bool certified = true;
    double x2 = 0.0;
    try {
      x2 = lower_bound_x2(norms, eig.lambda1);
    } catch (const CertificateError&) {
      certified = false;
    }

    if (!certified) {
      // No bracket on this mesh; refine on the indicators and retry.
      ++strikes;
      const std::vector<int> marked = bulk_mark(indicators, spec.theta);
      if (strikes >= kCertificateStrikes || marked.empty()) {
        out.history.status = RunStatus::CertificateFailure;
        out.final_mesh = spec.mesh;
        return out;
      }
      spec.mesh = refine(spec.mesh, marked);
      continue;
    }
    strikes = 0;

    const BoundsResult bounds = constant_bounds(spec, eig, x2);
    const bool stop = bounds.rel_err <= spec.err_tol;
    std::vector<int> marked;
    if (!stop) marked = bulk_mark(indicators, spec.theta);

    IterationRecord rec;
    rec.iter = static_cast<int>(out.history.records.size());
    rec.n_dof = bounds.n_dof;
    rec.c_low = bounds.c_low;
    rec.c_up = bounds.c_up;
    rec.rel_err = bounds.rel_err;
    rec.d1 = bounds.d1;
    rec.d2 = bounds.d2;
    rec.trusted = bounds.trusted;
    rec.marked = static_cast<int>(marked.size());
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tick).count();
    out.history.records.push_back(rec);

    out.final_bounds = bounds;
    have_bounds = true;

    if (observer) {
      const IterationContext ctx{rec.iter, spec.mesh,  spec,   eig,
                                 q,        indicators, bounds, out.history.records.back()};
      observer(ctx);
    }

    if (stop || marked.empty()) {
      out.history.status = RunStatus::Converged;
      out.final_mesh = spec.mesh;
      return out;
    }
    spec.mesh = refine(spec.mesh, marked);
  }

  out.final_mesh = spec.mesh;
  if (!have_bounds) out.history.status = RunStatus::CertificateFailure;
  return out;
}

}  // namespace eigenbound
