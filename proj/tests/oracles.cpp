#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "../src/quadrature.hpp"
#include "eigenbound/errors.hpp"

namespace eigenbound::testing {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double friedrichs_lambda1() { return 5.0 * kPi * kPi / 16.0; }
double friedrichs_lambda2() { return 13.0 * kPi * kPi / 16.0; }
double friedrichs_constant() { return 4.0 / (kPi * std::sqrt(5.0)); }
double poincare_constant() { return 2.0 / kPi; }
double trace_constant() { return std::sqrt(2.0 / (kPi / std::tanh(kPi))); }

SolvedEigen solve_eigenproblem(const ProblemSpec& spec, int count) {
  SolvedEigen out;
  const SparseSymMatrix K = assemble_energy_matrix(spec.mesh, spec.coefficients);
  const SparseSymMatrix M = assemble_target_matrix(spec.mesh, spec.kind);
  out.reduced = eliminate_dirichlet(K, M, spec.mesh);
  if (spec.kind == ProblemKind::Poincare) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(out.reduced.K.dim());
    out.eig = smallest_eigenpairs(out.reduced.K, out.reduced.M, count, &ones);
  } else {
    out.eig = smallest_eigenpairs(out.reduced.K, out.reduced.M, count);
  }
  out.eig.vertex1 = prolong_to_vertices(out.eig.vector1, out.reduced.dofs);
  return out;
}

Eigen::VectorXd solve_flux_coefficients(const FluxSpace& space, const ProblemSpec& spec,
                                        const EigenApprox& eig) {
  const FluxSystem sys = assemble_flux_system(space, spec, eig);
  return solve_spd(sys.matrix, sys.rhs);
}

OracleIntegrals oracle_residual_integrals(const ProblemSpec& spec, const EigenApprox& eig,
                                          const FluxField& q) {
  const Mesh& mesh = spec.mesh;
  const FluxSpace& space = *q.space;
  const FluxMonomials mono = monomialize(q);
  const double lambda = eig.lambda1;
  const bool trace = spec.kind == ProblemKind::Trace;

  OracleIntegrals out;
  out.flux_sq.assign(mesh.num_triangles(), 0.0);
  out.scalar_sq.assign(mesh.num_triangles(), 0.0);
  if (trace) out.edge_sq.assign(mesh.num_triangles(), 0.0);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const Eigen::Vector2d p0(mesh.vertices[tri.v[0]].x, mesh.vertices[tri.v[0]].y);
    const Eigen::Vector2d p1(mesh.vertices[tri.v[1]].x, mesh.vertices[tri.v[1]].y);
    const Eigen::Vector2d p2(mesh.vertices[tri.v[2]].x, mesh.vertices[tri.v[2]].y);
    const double area = mesh.triangle_area(t);
    const Eigen::Matrix2d a = spec.coefficients.diffusion[tri.region];
    const Eigen::Matrix2d ainv = a.inverse();
    const double react =
        spec.coefficients.reaction.empty() ? 0.0 : spec.coefficients.reaction[tri.region];

    // P1 gradient from the vertex values.
    Eigen::Matrix2d jac;
    jac.col(0) = p1 - p0;
    jac.col(1) = p2 - p0;
    const Eigen::Vector2d du(eig.vertex1[tri.v[1]] - eig.vertex1[tri.v[0]],
                             eig.vertex1[tri.v[2]] - eig.vertex1[tri.v[0]]);
    const Eigen::Vector2d grad = jac.transpose().fullPivLu().solve(du);

    for (int g = 0; g < quad::kTri6N; ++g) {
      const double b0 = quad::kTri6B[g][0], b1 = quad::kTri6B[g][1], b2 = quad::kTri6B[g][2];
      const Eigen::Vector2d x = b0 * p0 + b1 * p1 + b2 * p2;
      const double u = b0 * eig.vertex1[tri.v[0]] + b1 * eig.vertex1[tri.v[1]] +
                       b2 * eig.vertex1[tri.v[2]];
      const Eigen::Vector2d qv = flux_value(space, mono, t, x.x(), x.y());
      const double dv = flux_divergence(space, mono, t, x.x(), x.y());
      const Eigen::Vector2d e = grad - ainv * qv;
      const double w = quad::kTri6W[g] * area;
      out.flux_sq[t] += w * e.dot(a * e);
      const double s = trace ? react * u - dv : (lambda - react) * u + dv;
      out.scalar_sq[t] += w * s * s;
    }
  }

  if (trace) {
    const double alpha = spec.coefficients.robin_alpha;
    for (const FluxSpace::NeumannEdge& ne : space.neumann) {
      const int e = ne.edge;
      const Eigen::Vector2d pa(space.edge_ax[e], space.edge_ay[e]);
      const Eigen::Vector2d pb(space.edge_bx[e], space.edge_by[e]);
      const Eigen::Vector2d nout = ne.sign * Eigen::Vector2d(space.edge_nx[e], space.edge_ny[e]);
      const int t = ne.tri;
      const Triangle& tri = mesh.triangles[t];
      const Eigen::Vector2d p0(mesh.vertices[tri.v[0]].x, mesh.vertices[tri.v[0]].y);
      Eigen::Matrix2d jac;
      jac.col(0) = Eigen::Vector2d(mesh.vertices[tri.v[1]].x, mesh.vertices[tri.v[1]].y) - p0;
      jac.col(1) = Eigen::Vector2d(mesh.vertices[tri.v[2]].x, mesh.vertices[tri.v[2]].y) - p0;
      const Eigen::FullPivLU<Eigen::Matrix2d> lu(jac);
      for (int g = 0; g < quad::kEdge4N; ++g) {
        const double s = quad::kEdge4X[g];
        const Eigen::Vector2d x = pa + s * (pb - pa);
        const Eigen::Vector2d bc = lu.solve(x - p0);  // barycentric 1, 2
        const double u = (1.0 - bc[0] - bc[1]) * eig.vertex1[tri.v[0]] +
                         bc[0] * eig.vertex1[tri.v[1]] + bc[1] * eig.vertex1[tri.v[2]];
        const Eigen::Vector2d qv = flux_value(space, mono, t, x.x(), x.y());
        const double r = (alpha - lambda) * u + qv.dot(nout);
        out.edge_sq[t] += quad::kEdge4W[g] * space.edge_len[e] * r * r;
      }
    }
  }
  return out;
}

double oracle_indicator_total(const ProblemSpec& spec, const EigenApprox& eig,
                              const FluxField& q) {
  const OracleIntegrals o = oracle_residual_integrals(spec, eig, q);
  const double lambda = eig.lambda1;
  const double rho = spec.rho;
  double total = 0.0;
  if (spec.kind == ProblemKind::Trace) {
    const double cf = *spec.friedrichs_upper;
    const double sig = spec.sigma;
    const double w1 = (1.0 + 1.0 / rho) * (1.0 + 1.0 / sig);
    const double w2 = (1.0 + rho) * (1.0 + 1.0 / sig) * cf * cf;
    const double w3 = (1.0 + sig) / lambda;
    for (std::size_t i = 0; i < o.flux_sq.size(); ++i)
      total += w1 * o.flux_sq[i] + w2 * o.scalar_sq[i] + w3 * o.edge_sq[i];
  } else {
    const double w1 = 1.0 + 1.0 / rho;
    const double w2 = (1.0 + rho) / lambda;
    for (std::size_t i = 0; i < o.flux_sq.size(); ++i)
      total += w1 * o.flux_sq[i] + w2 * o.scalar_sq[i];
  }
  return total;
}

std::vector<int> mirror_triangle_map(const Mesh& mesh) {
  const int n = mesh.num_triangles();
  std::vector<int> map(n, -1);
  for (int t = 0; t < n; ++t) {
    const Vec2 c = mesh.centroid(t);
    for (int s = 0; s < n; ++s) {
      const Vec2 cs = mesh.centroid(s);
      if (std::abs(cs.x - c.x) <= 1e-12 && std::abs(cs.y + c.y) <= 1e-12) {
        map[t] = s;
        break;
      }
    }
    if (map[t] < 0) throw std::runtime_error("mesh is not mirror symmetric");
  }
  return map;
}

}  // namespace eigenbound::testing
