#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "eigenbound/bounds.hpp"
#include "eigenbound/errors.hpp"
#include "oracles.hpp"

using namespace eigenbound;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ProblemSpec square_problem(ProblemKind kind, double contrast) {
  ProblemSpec spec;
  spec.kind = kind;
  const BoundaryLabel d = BoundaryLabel::Dirichlet, n = BoundaryLabel::Neumann;
  spec.mesh = build_initial_mesh(kind == ProblemKind::Poincare
                                     ? SquareBoundaryRule{n, n, n, n}
                                     : SquareBoundaryRule{d, n, d, d});
  spec.coefficients.diffusion = {Eigen::Matrix2d::Identity(),
                                 contrast * Eigen::Matrix2d::Identity()};
  spec.coefficients.reaction = {0.0, 0.0};
  if (kind == ProblemKind::Trace) spec.friedrichs_upper = 0.58;
  return spec;
}

void uniform_refine(Mesh& mesh, int rounds) {
  for (int r = 0; r < rounds; ++r) {
    std::vector<int> ids(mesh.num_triangles());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    mesh = refine(mesh, ids);
  }
}

ResidualNorms norms_of(double alpha, double beta) {
  ResidualNorms n;
  n.norm_a = alpha;
  n.norm_b = beta;
  n.target_norm = 1.0;
  n.alpha = alpha;
  n.beta = beta;
  return n;
}

}  // namespace

TEST_CASE("lower bound root in closed form") {
  // zero residuals: the root collapses to sqrt(lambda_star), exactly
  CHECK(lower_bound_x2(norms_of(0.0, 0.0), 2.0) == std::sqrt(2.0));
  CHECK(lower_bound_x2(norms_of(0.0, 0.0), 5.0) == std::sqrt(5.0));
  // alpha = 1, beta = 0, lambda_star = 2: (-1 + sqrt(9)) / 2 = 1
  CHECK(lower_bound_x2(norms_of(1.0, 0.0), 2.0) == 1.0);

  // the defining quadratic x2^2 + alpha x2 + beta = lambda_star
  for (double a : {0.0, 0.3, 1.0})
    for (double b : {0.0, 0.5, 1.4}) {
      const double x2 = lower_bound_x2(norms_of(a, b), 2.0);
      CHECK(x2 > 0.0);
      CHECK(x2 * x2 + a * x2 + b == Approx(2.0).epsilon(1e-14));
      CHECK(x2 * x2 <= 2.0 * (1.0 + 1e-15));
    }
}

TEST_CASE("certificate refusal when the scalar residual dominates") {
  CHECK_THROWS_AS(lower_bound_x2(norms_of(0.5, 2.0), 2.0), CertificateError);
  CHECK_THROWS_AS(lower_bound_x2(norms_of(0.5, 2.5), 2.0), CertificateError);
  try {
    lower_bound_x2(norms_of(0.1, 3.0), 2.0);
    FAIL("expected a certificate failure");
  } catch (const CertificateError& e) {
    CHECK(e.beta == 3.0);
    CHECK(e.lambda_star == 2.0);
    CHECK(std::string(e.what()).find("refine") != std::string::npos);
  }
  CHECK_THROWS_AS(lower_bound_x2(norms_of(0.0, 0.0), 0.0), ArgumentError);
  CHECK_THROWS_AS(lower_bound_x2(norms_of(-0.1, 0.0), 2.0), ArgumentError);
}

TEST_CASE("the root shrinks as either residual grows") {
  double prev = kInf;
  for (double a : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    const double x2 = lower_bound_x2(norms_of(a, 0.5), 3.0);
    CHECK(x2 < prev);
    prev = x2;
  }
  prev = kInf;
  for (double b : {0.0, 0.5, 1.0, 2.0}) {
    const double x2 = lower_bound_x2(norms_of(0.5, b), 3.0);
    CHECK(x2 < prev);
    prev = x2;
  }
}

TEST_CASE("residual norms with the zero flux") {
  const ProblemSpec spec = square_problem(ProblemKind::Friedrichs, 1.0);
  const testing::SolvedEigen s = testing::solve_eigenproblem(spec);
  const FluxSpace space = build_flux_space(spec.mesh, spec.kind);
  const FluxField zero{&space, Eigen::VectorXd::Zero(space.n_dofs)};
  const ResidualNorms n = compute_residual_norms(spec, s.eig, zero);
  // q = 0 leaves the full gradient: norm_a^2 = energy = lambda * mass
  CHECK(n.target_norm == Approx(1.0).epsilon(1e-12));
  CHECK(n.norm_a == Approx(std::sqrt(s.eig.lambda1)).epsilon(1e-11));
  CHECK(n.norm_b == Approx(s.eig.lambda1 * n.target_norm).epsilon(1e-11));
  CHECK(n.alpha == n.norm_a / n.target_norm);
  CHECK(n.beta == n.norm_b / n.target_norm);
}

TEST_CASE("elementwise residuals match an independent quadrature") {
  for (ProblemKind kind :
       {ProblemKind::Friedrichs, ProblemKind::Poincare, ProblemKind::Trace}) {
    CAPTURE(problem_kind_name(kind));
    ProblemSpec spec = square_problem(kind, 10.0);
    uniform_refine(spec.mesh, 1);
    const testing::SolvedEigen s = testing::solve_eigenproblem(spec);
    const FluxSpace space = build_flux_space(spec.mesh, spec.kind);
    const FluxField q{&space, testing::solve_flux_coefficients(space, spec, s.eig)};

    const ResidualPieces got = residual_pieces(spec, s.eig, q);
    const testing::OracleIntegrals want = testing::oracle_residual_integrals(spec, s.eig, q);

    REQUIRE(got.flux_sq.size() == want.flux_sq.size());
    REQUIRE(got.scalar_sq.size() == want.scalar_sq.size());
    double scale = 0.0;
    for (double v : want.flux_sq) scale = std::max(scale, v);
    for (double v : want.scalar_sq) scale = std::max(scale, v);
    for (std::size_t t = 0; t < got.flux_sq.size(); ++t) {
      CHECK(std::abs(got.flux_sq[t] - want.flux_sq[t]) <= 1e-12 * (1.0 + scale));
      CHECK(std::abs(got.scalar_sq[t] - want.scalar_sq[t]) <= 1e-12 * (1.0 + scale));
    }
    if (kind == ProblemKind::Trace) {
      REQUIRE(got.edge_sq.size() == got.flux_sq.size());
      for (std::size_t t = 0; t < got.edge_sq.size(); ++t)
        CHECK(std::abs(got.edge_sq[t] - want.edge_sq[t]) <= 1e-12 * (1.0 + scale));
    } else {
      CHECK(got.edge_sq.empty());
    }
  }
}

TEST_CASE("residual evaluation validates its inputs") {
  const ProblemSpec spec = square_problem(ProblemKind::Friedrichs, 1.0);
  const testing::SolvedEigen s = testing::solve_eigenproblem(spec);
  const FluxSpace wrong_kind = build_flux_space(spec.mesh, ProblemKind::Trace);
  const FluxField q{&wrong_kind, Eigen::VectorXd::Zero(wrong_kind.n_dofs)};
  CHECK_THROWS_AS(residual_pieces(spec, s.eig, q), ArgumentError);

  const FluxSpace space = build_flux_space(spec.mesh, spec.kind);
  const FluxField ok{&space, Eigen::VectorXd::Zero(space.n_dofs)};
  EigenApprox bad = s.eig;
  bad.vertex1.resize(3);
  CHECK_THROWS_AS(residual_pieces(spec, bad, ok), ArgumentError);
}

TEST_CASE("closeness diagnostics") {
  // exact lower bound, comfortable spectral gap
  Diagnostics d = closeness_diagnostics(2.0, 4.0, std::sqrt(2.0));
  CHECK(std::abs(d.d1) <= 1e-15);
  CHECK(d.d2 == Approx(0.25).epsilon(1e-15));
  CHECK(d.trusted);

  // no gap at all: d2 = 0, never trusted
  d = closeness_diagnostics(2.0, 2.0, std::sqrt(2.0));
  CHECK(d.d2 == 0.0);
  CHECK(!d.trusted);

  // exhausted pencil: the limit value
  d = closeness_diagnostics(2.0, kInf, 1.0);
  CHECK(d.d2 == 0.5);
  CHECK(d.d1 == Approx(1.0).epsilon(1e-15));
  CHECK(!d.trusted);  // d1 = 1 > 0.5 / 5

  // mixed eigenvalue bracket of the reference problem
  const double l1 = testing::friedrichs_lambda1();
  const double l2 = testing::friedrichs_lambda2();
  d = closeness_diagnostics(l1, l2, std::sqrt(l1));
  CHECK(d.d2 == Approx(4.0 / 13.0).epsilon(1e-15));
  CHECK(d.trusted);

  // a loose lower bound flips the flag
  d = closeness_diagnostics(2.0, 4.0, 1.2, 5.0);
  CHECK(d.d1 > d.d2 / 5.0);
  CHECK(!d.trusted);
  CHECK(closeness_diagnostics(2.0, 4.0, 1.2, 20.0).trusted == false);

  CHECK_THROWS_AS(closeness_diagnostics(0.0, 4.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(closeness_diagnostics(2.0, 4.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(closeness_diagnostics(2.0, 4.0, 1.0, 0.0), ArgumentError);
}

TEST_CASE("bound assembly field identities") {
  const ProblemSpec spec = square_problem(ProblemKind::Friedrichs, 1.0);
  const testing::SolvedEigen s = testing::solve_eigenproblem(spec);
  const FluxSpace space = build_flux_space(spec.mesh, spec.kind);
  const FluxField q{&space, testing::solve_flux_coefficients(space, spec, s.eig)};
  const ResidualNorms n = compute_residual_norms(spec, s.eig, q);
  const double x2 = lower_bound_x2(n, s.eig.lambda1);

  const BoundsResult r = constant_bounds(spec, s.eig, x2);
  CHECK(r.x2 == x2);
  CHECK(r.lambda_low == x2 * x2);
  CHECK(r.lambda_up == s.eig.lambda1);
  CHECK(r.c_low == 1.0 / std::sqrt(s.eig.lambda1));
  CHECK(r.c_up == 1.0 / x2);
  CHECK(r.c_avg == 0.5 * (r.c_low + r.c_up));
  CHECK(r.rel_err == (r.c_up - r.c_low) / r.c_avg);
  CHECK(r.c_low <= r.c_up);
  CHECK(r.n_dof == static_cast<int>(s.eig.vector1.size()));

  const Diagnostics d = closeness_diagnostics(s.eig.lambda1, s.eig.lambda2, x2, spec.trust_factor);
  CHECK(r.d1 == d.d1);
  CHECK(r.d2 == d.d2);
  CHECK(r.trusted == d.trusted);

  CHECK_THROWS_AS(constant_bounds(spec, s.eig, 0.0), ArgumentError);
}

TEST_CASE("brackets contain the reference constants on coarse meshes") {
  struct Row {
    ProblemKind kind;
    double exact;
  };
  const Row rows[] = {{ProblemKind::Friedrichs, testing::friedrichs_constant()},
                      {ProblemKind::Poincare, testing::poincare_constant()},
                      {ProblemKind::Trace, testing::trace_constant()}};
  for (const Row& row : rows) {
    CAPTURE(problem_kind_name(row.kind));
    ProblemSpec spec = square_problem(row.kind, 1.0);
    uniform_refine(spec.mesh, 2);
    const testing::SolvedEigen s = testing::solve_eigenproblem(spec);
    const FluxSpace space = build_flux_space(spec.mesh, spec.kind);
    const FluxField q{&space, testing::solve_flux_coefficients(space, spec, s.eig)};
    const ResidualNorms n = compute_residual_norms(spec, s.eig, q);
    const double x2 = lower_bound_x2(n, s.eig.lambda1);
    const BoundsResult r = constant_bounds(spec, s.eig, x2);
    CHECK(r.c_low <= row.exact);
    CHECK(row.exact <= r.c_up);
  }
}
