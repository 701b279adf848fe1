#pragma once

#include <vector>

#include "eigenbound/eigensolve.hpp"
#include "eigenbound/flux.hpp"
#include "eigenbound/problem.hpp"

namespace eigenbound {

// Elementwise squared residual contributions. The exact same quadrature
// backs the global norms and the refinement indicators, so the localized
// sums reproduce the global functionals exactly.
struct ResidualPieces {
  // integral over K of (grad u - Ainv q)' A (grad u - Ainv q)
  std::vector<double> flux_sq;
  // Friedrichs/Poincare: integral of ((lambda - c) u + div q)^2 over K;
  // Trace: integral of (c u - div q)^2 over K
  std::vector<double> scalar_sq;
  // Trace only: integral of ((alpha - lambda) u + q.n)^2 over the Neumann
  // edges of K, accumulated on the owning element; empty otherwise
  std::vector<double> edge_sq;
};
ResidualPieces residual_pieces(const ProblemSpec& spec, const EigenApprox& eig,
                               const FluxField& q);

// The two residual norms entering the lower bound, normalized by the target
// norm of the eigenvector approximation (1 by construction).
struct ResidualNorms {
  double norm_a = 0.0;
  double norm_b = 0.0;
  double target_norm = 1.0;
  double alpha = 0.0;  // norm_a / target_norm
  double beta = 0.0;   // norm_b / target_norm
};
ResidualNorms compute_residual_norms(const ProblemSpec& spec, const EigenApprox& eig,
                                     const FluxField& q);

// x2 = (-alpha + sqrt(alpha^2 + 4 (lambda_star - beta))) / 2; positive and
// x2^2 <= lambda_star whenever it exists. Requires beta < lambda_star,
// otherwise CertificateError carrying (beta, lambda_star) — the remedy is to
// refine and recompute.
double lower_bound_x2(const ResidualNorms& norms, double lambda_star);

struct Diagnostics {
  double d1 = 0.0;  // (lambda_star - x2^2) / x2^2, gap of the lower bound
  double d2 = 0.0;  // (lambda2_mid - lambda_star) / lambda2_up with
                    // lambda2_mid = (lambda_star + lambda2_up) / 2
  bool trusted = false;  // d2 > 0 and d1 <= d2 / trust_factor
};
// lambda2_up = inf (exhausted pencil) gives the limit value d2 = 1/2.
Diagnostics closeness_diagnostics(double lambda_star, double lambda2_up, double x2,
                                  double trust_factor = 5.0);

struct BoundsResult {
  double x2 = 0.0;
  double lambda_low = 0.0;  // x2^2
  double lambda_up = 0.0;   // Galerkin eigenvalue
  double c_low = 0.0;       // lambda_up^{-1/2}
  double c_up = 0.0;        // 1 / x2
  double c_avg = 0.0;
  double rel_err = 0.0;  // (c_up - c_low) / c_avg
  double d1 = 0.0;
  double d2 = 0.0;
  bool trusted = false;
  int n_dof = 0;  // retained unknowns of the eigenvalue solve
};
BoundsResult constant_bounds(const ProblemSpec& spec, const EigenApprox& eig, double x2);

}  // namespace eigenbound
