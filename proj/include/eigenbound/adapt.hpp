#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eigenbound/bounds.hpp"
#include "eigenbound/eigensolve.hpp"
#include "eigenbound/flux.hpp"
#include "eigenbound/problem.hpp"

namespace eigenbound {

// Refinement indicator eta_K per triangle, from the same elementwise
// quadrature as the residual norms, so the sum of eta_K^2 reproduces the
// global quadratic functional exactly.
std::vector<double> compute_indicators(const ProblemSpec& spec, const EigenApprox& eig,
                                       const FluxField& q);

// Bulk criterion: sort indicators descending (ties by triangle id ascending)
// and return the shortest prefix whose squared sum reaches theta^2 of the
// total. All-zero indicators give an empty set.
std::vector<int> bulk_mark(const std::vector<double>& indicators, double theta);

struct IterationRecord {
  int iter = 0;
  int n_dof = 0;
  double c_low = 0.0;
  double c_up = 0.0;
  double rel_err = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  bool trusted = false;
  int marked = 0;
  double seconds = 0.0;  // wall time of the iteration; not deterministic
};

enum class RunStatus { Converged, IterationCap, CertificateFailure };
std::string run_status_name(RunStatus status);

struct AdaptHistory {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::IterationCap;
};

struct AdaptResult {
  AdaptHistory history;
  BoundsResult final_bounds;
  Mesh final_mesh;
};

// Everything the loop computed on one iteration's mesh, handed to the
// observer before refinement; references die with the callback.
struct IterationContext {
  int iter;
  const Mesh& mesh;
  const ProblemSpec& spec;  // spec with this iteration's mesh
  const EigenApprox& eig;
  const FluxField& flux;
  const std::vector<double>& indicators;
  const BoundsResult& bounds;
  const IterationRecord& record;
};
using IterationObserver = std::function<void(const IterationContext&)>;

// The adaptive loop: assemble, solve the eigenvalue problem (two pairs),
// reconstruct the flux, evaluate bounds and diagnostics, stop when
// rel_err <= spec.err_tol, otherwise mark (bulk criterion with spec.theta)
// and refine. Hard iteration cap of 40. A certificate failure refines on
// the indicators and retries; three consecutive failures end the run with
// CertificateFailure status (history keeps the successful records).
AdaptResult run_adaptive(const ProblemSpec& spec, const IterationObserver& observer = {});

}  // namespace eigenbound
