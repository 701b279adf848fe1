#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "eigenbound/mesh.hpp"

namespace eigenbound {

enum class ProblemKind { Friedrichs, Poincare, Trace };

ProblemKind parse_problem_kind(const std::string& text);
std::string problem_kind_name(ProblemKind kind);

// Piecewise-constant data of the operator -div(A grad u) + c u, indexed by
// the mesh region id. robin_alpha is the boundary coefficient on the Neumann
// part; only the Trace kind admits a nonzero value.
struct Coefficients {
  std::vector<Eigen::Matrix2d> diffusion;
  std::vector<double> reaction;
  double robin_alpha = 0.0;
};

// One bound computation: which constant, on which mesh, with which data and
// algorithm parameters.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::Friedrichs;
  Mesh mesh;
  Coefficients coefficients;
  double theta = 0.75;       // bulk marking fraction
  double err_tol = 0.01;     // stop when (c_up - c_low)/c_avg <= err_tol
  double rho = 1.0;          // residual-splitting parameter
  double sigma = 2.0;        // Trace-only second splitting parameter
  double trust_factor = 5.0; // diagnostics: trusted iff d1 <= d2 / trust_factor
  // Certified upper bound for the Friedrichs constant of the same data;
  // required by the Trace kind (it enters the flux functional and norm A).
  std::optional<double> friedrichs_upper;

  // Throws ConfigError / CoefficientError when the combination is unusable:
  // non-SPD diffusion, negative reaction, label sets incompatible with the
  // kind (Poincare needs an all-Neumann boundary and zero reaction; Trace
  // needs a Neumann part and friedrichs_upper; every kind needs a coercivity
  // source).
  void validate() const;
};

}  // namespace eigenbound
