#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eigenbound/adapt.hpp"
#include "eigenbound/problem.hpp"

namespace eigenbound {

// One sweep over the built-in checkerboard family.
struct RunConfig {
  ProblemKind kind = ProblemKind::Friedrichs;
  std::vector<double> contrasts = {1.0};  // coefficient value a per run
  double theta = 0.75;
  double err_tol = 0.01;
  double rho = 1.0;
  double sigma = 2.0;  // Trace only
  double trust_factor = 5.0;
  std::string out_dir = ".";
  bool emit_vtk = false;
  // Analytic override of the certified constant a Trace run needs; when
  // absent the driver loads or computes it per sweep entry.
  std::optional<double> friedrichs_upper;
};

// Key-value text (`key = value` lines, '#' comments) or a JSON object with
// the same keys; the format is detected from the first non-space byte.
// Keys: kind (required), a (number or list), theta, err_tol, rho, sigma,
// trust_factor, out_dir, emit_vtk, friedrichs_upper.
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::string& path);

// The built-in experiment family: the square (-1,1)^2 split into a
// checkerboard by the coordinate axes, A = I where x*y <= 0 and
// A = contrast * I where x*y > 0, c = 0, boundary coefficient 0.
// Friedrichs/Trace: Dirichlet boundary except the Neumann right side x = 1;
// Poincare: all-Neumann boundary. Algorithm parameters keep their defaults;
// the sweep driver overrides them from the config.
ProblemSpec checkerboard_problem(ProblemKind kind, double contrast);

struct RunOutcome {
  double contrast = 1.0;
  RunStatus status = RunStatus::IterationCap;
  int iterations = 0;
  BoundsResult bounds;
};

// Executes the sweep: per entry a history-<a>.csv (streamed row by row),
// optional per-iteration VTK dumps, and a final summary.json with one flat
// record per entry. A Trace sweep resolves the certified constant per
// entry: the explicit friedrichs_upper wins, then a cache file
// friedrichs-<a>.json in out_dir (refused when its stored coefficient
// differs), then a fresh in-process run whose result is cached for later.
// Returns 0 when every entry converged with a trusted bracket, 1 otherwise.
int run_sweep(const RunConfig& config, std::vector<RunOutcome>* outcomes = nullptr);

}  // namespace eigenbound
