#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "eigenbound/assembly.hpp"
#include "eigenbound/eigensolve.hpp"
#include "eigenbound/kernels.hpp"
#include "eigenbound/problem.hpp"

namespace eigenbound {

// First-order Raviart-Thomas space on the triangulation: 8 unknowns per
// element (two normal-trace moments per edge against {1, 2s-1}, two interior
// mean-value moments), edge unknowns shared between neighbors, which makes
// normal traces continuous (H(div) conformity is exact, not approximate).
// Depending on the kind some boundary edges carry the essential constraint
// q.n = 0 and lose their unknowns:
//   Friedrichs: Neumann edges;  Poincare: all boundary edges;  Trace: none.
// Unknown order: edge pairs by lexicographic (v0, v1), then 2 per triangle.
struct FluxSpace {
  ProblemKind kind = ProblemKind::Friedrichs;
  int n_vertices = 0;
  int n_triangles = 0;
  int n_dofs = 0;

  struct Edge {
    std::int32_t v0 = -1, v1 = -1;  // v0 < v1
  };
  std::vector<Edge> edges;                             // sorted by (v0, v1)
  std::vector<std::array<std::int32_t, 3>> tri_edges;  // local edge i = (v_i, v_{i+1})
  std::vector<bool> constrained;                       // per edge
  std::vector<std::int32_t> edge_dof;                  // first of two, -1 when constrained
  std::int32_t interior_base = 0;                      // triangle t owns base+2t, base+2t+1

  // Edge geometry in the global orientation v0 -> v1; the normal is the
  // tangent rotated by -90 degrees. Endpoint coordinates are cached so the
  // space is self-contained for quadrature along edges.
  std::vector<double> edge_nx, edge_ny, edge_len;
  std::vector<double> edge_ax, edge_ay, edge_bx, edge_by;

  struct NeumannEdge {
    std::int32_t edge = -1;   // edge id
    std::int32_t tri = -1;    // owning triangle
    std::int8_t local = 0;    // local edge index in the owner
    double sign = 1.0;        // +1 when the stored normal points outward
  };
  std::vector<NeumannEdge> neumann;

  kernels::ElementBatch geom;  // geometry-only batch; frame of the monomials
  // Maps local unknown values to monomial coefficients per element. Local
  // unknown order: (edge0 m0, edge0 m1, edge1 m0, edge1 m1, edge2 m0,
  // edge2 m1, interior x, interior y).
  std::vector<Eigen::Matrix<double, 8, 8>> vinv;
};

FluxSpace build_flux_space(const Mesh& mesh, ProblemKind kind);

struct FluxField {
  const FluxSpace* space = nullptr;
  Eigen::VectorXd coefficients;
};

// Quadratic minimization problem whose solution reconstructs the flux for
// the lower-bound certificate. All blocks are assembled with exact
// quadrature; the matrix is SPD.
struct FluxSystem {
  SparseSymMatrix matrix;
  Eigen::VectorXd rhs;
};

// Requires eig.vertex1 filled (prolonged to all vertices) and, for the Trace
// kind, spec.friedrichs_upper. The mesh behind `space` must be the mesh in
// `spec` (checked by sizes).
FluxSystem assemble_flux_system(const FluxSpace& space, const ProblemSpec& spec,
                                const EigenApprox& eig);

// Sparse Cholesky with a verified relative residual (<= 1e-10), otherwise
// MatrixError.
Eigen::VectorXd solve_spd(const SparseSymMatrix& A, const Eigen::VectorXd& b);

// Per-element monomial coefficients of a field, structure-of-arrays; the
// representation consumed by the residual kernels. Components on element t
// with frame (xi, eta):
//   qx = q0 + q1 xi + q2 eta + q6 xi^2 + q7 xi eta
//   qy = q3 + q4 xi + q5 eta + q6 xi eta + q7 eta^2
struct FluxMonomials {
  std::vector<double> q[8];
};
FluxMonomials monomialize(const FluxField& field);

// Pointwise evaluation (physical coordinates); for tests and export.
Eigen::Vector2d flux_value(const FluxSpace& space, const FluxMonomials& mono, int tri,
                           double x, double y);
double flux_divergence(const FluxSpace& space, const FluxMonomials& mono, int tri,
                       double x, double y);

// Closed forms of the reconstructed field: the divergence as a linear
// polynomial per element (coefficients in the element frame) and the
// outward normal trace on each Neumann boundary edge as a quadratic in the
// arc parameter s in [0,1] (from vertex v0 to v1); entries parallel to
// space.neumann. For a first-order space the s^2 coefficient vanishes up to
// roundoff.
struct FluxFields {
  std::vector<std::array<double, 3>> divergence;           // d0 + d1 xi + d2 eta
  std::vector<std::array<double, 3>> neumann_normal_trace;  // c0 + c1 s + c2 s^2
};
FluxFields flux_fields(const FluxField& field);

// Unknown values of an analytic field (exact when the field is polynomial
// of degree <= 2). Constrained edges are skipped, so the result represents
// the input only when its normal trace vanishes there.
Eigen::VectorXd interpolate_flux(const FluxSpace& space,
                                 const std::function<Eigen::Vector2d(double, double)>& f);

}  // namespace eigenbound
