#include "eigenbound/bounds.hpp"

#include <cmath>
#include <limits>

#include "eigenbound/errors.hpp"
#include "eigenbound/kernels.hpp"
#include "quadrature.hpp"

namespace eigenbound {

ResidualPieces residual_pieces(const ProblemSpec& spec, const EigenApprox& eig,
                               const FluxField& q) {
  const FluxSpace& space = *q.space;
  if (space.kind != spec.kind)
    throw ArgumentError("residual pieces: flux space built for a different kind");
  if (space.n_vertices != spec.mesh.num_vertices() ||
      space.n_triangles != spec.mesh.num_triangles())
    throw ArgumentError("residual pieces: flux space does not match the mesh");
  if (static_cast<int>(eig.vertex1.size()) != space.n_vertices)
    throw ArgumentError("residual pieces: eigenvector not prolonged to mesh vertices");
  const double lambda = eig.lambda1;
  if (!(lambda > 0.0)) throw ArgumentError("residual pieces: nonpositive eigenvalue");

  kernels::ElementBatch batch = space.geom;
  kernels::attach_coefficients(batch, spec.mesh, spec.coefficients);

  const FluxMonomials mono = monomialize(q);
  const int nt = space.n_triangles;
  kernels::ResidualBatch rhs;
  for (int j = 0; j < 8; ++j) rhs.q[j] = mono.q[j];
  rhs.u0.resize(nt);
  rhs.u1.resize(nt);
  rhs.u2.resize(nt);
  rhs.su.resize(nt);
  const bool trace = spec.kind == ProblemKind::Trace;
  rhs.sdiv = trace ? -1.0 : 1.0;
  for (int t = 0; t < nt; ++t) {
    const auto& v = spec.mesh.triangles[t].v;
    rhs.u0[t] = eig.vertex1[v[0]];
    rhs.u1[t] = eig.vertex1[v[1]];
    rhs.u2[t] = eig.vertex1[v[2]];
    rhs.su[t] = trace ? batch.react[t] : lambda - batch.react[t];
  }

  ResidualPieces out;
  out.flux_sq.resize(nt);
  out.scalar_sq.resize(nt);
  kernels::residual_terms(batch, rhs, out.flux_sq.data(), out.scalar_sq.data());

  if (trace) {
    out.edge_sq.assign(nt, 0.0);
    const double alpha = spec.coefficients.robin_alpha;
    for (const FluxSpace::NeumannEdge& nb : space.neumann) {
      const std::int32_t g = nb.edge;
      const double ua = eig.vertex1[space.edges[g].v0];
      const double ub = eig.vertex1[space.edges[g].v1];
      const double nx = space.edge_nx[g] * nb.sign;
      const double ny = space.edge_ny[g] * nb.sign;
      const double len = space.edge_len[g];
      double acc = 0.0;
      for (int p = 0; p < quad::kEdge3N; ++p) {
        const double sp = quad::kEdge3X[p];
        const double x = space.edge_ax[g] + sp * (space.edge_bx[g] - space.edge_ax[g]);
        const double y = space.edge_ay[g] + sp * (space.edge_by[g] - space.edge_ay[g]);
        const double up = (1.0 - sp) * ua + sp * ub;
        const Eigen::Vector2d qv = flux_value(space, mono, nb.tri, x, y);
        const double r = (alpha - lambda) * up + qv.x() * nx + qv.y() * ny;
        acc += quad::kEdge3W[p] * r * r;
      }
      out.edge_sq[nb.tri] += len * acc;
    }
  }
  return out;
}

ResidualNorms compute_residual_norms(const ProblemSpec& spec, const EigenApprox& eig,
                                     const FluxField& q) {
  const ResidualPieces p = residual_pieces(spec, eig, q);
  double fs = 0.0, ss = 0.0, es = 0.0;
  for (double v : p.flux_sq) fs += v;
  for (double v : p.scalar_sq) ss += v;
  for (double v : p.edge_sq) es += v;

  ResidualNorms n;
  n.target_norm = eig.normalization;
  if (!(n.target_norm > 0.0))
    throw ArgumentError("residual norms: eigenvector has nonpositive target norm");
  if (spec.kind == ProblemKind::Trace) {
    if (!spec.friedrichs_upper.has_value())
      throw ConfigError("residual norms: trace kind needs a certified domain constant");
    n.norm_a = std::sqrt(fs) + *spec.friedrichs_upper * std::sqrt(ss);
    n.norm_b = std::sqrt(es);
  } else {
    n.norm_a = std::sqrt(fs);
    n.norm_b = std::sqrt(ss);
  }
  n.alpha = n.norm_a / n.target_norm;
  n.beta = n.norm_b / n.target_norm;
  return n;
}

double lower_bound_x2(const ResidualNorms& norms, double lambda_star) {
  if (!(lambda_star > 0.0)) throw ArgumentError("lower bound: lambda_star must be positive");
  if (!(norms.alpha >= 0.0) || !(norms.beta >= 0.0))
    throw ArgumentError("lower bound: residual norms must be nonnegative");
  if (!(norms.beta < lambda_star))
    throw CertificateError(
        "certificate failed: the scalar residual dominates the eigenvalue "
        "(refine the mesh and recompute)",
        norms.beta, lambda_star);
  const double a = norms.alpha, b = norms.beta;
  return 0.5 * (-a + std::sqrt(a * a + 4.0 * (lambda_star - b)));
}

Diagnostics closeness_diagnostics(double lambda_star, double lambda2_up, double x2,
                                  double trust_factor) {
  if (!(lambda_star > 0.0) || !(x2 > 0.0))
    throw ArgumentError("diagnostics: lambda_star and x2 must be positive");
  if (!(trust_factor > 0.0)) throw ArgumentError("diagnostics: trust factor must be positive");
  Diagnostics d;
  d.d1 = (lambda_star - x2 * x2) / (x2 * x2);
  if (std::isinf(lambda2_up)) {
    d.d2 = 0.5;  // limit of ((lambda_star + L)/2 - lambda_star) / L as L -> inf
  } else {
    const double lambda2_mid = 0.5 * (lambda_star + lambda2_up);
    d.d2 = (lambda2_mid - lambda_star) / lambda2_up;
  }
  d.trusted = d.d2 > 0.0 && d.d1 <= d.d2 / trust_factor;
  return d;
}

BoundsResult constant_bounds(const ProblemSpec& spec, const EigenApprox& eig, double x2) {
  if (!(x2 > 0.0)) throw ArgumentError("constant bounds: x2 must be positive");
  if (!(eig.lambda1 > 0.0)) throw ArgumentError("constant bounds: nonpositive eigenvalue");
  BoundsResult r;
  r.x2 = x2;
  r.lambda_low = x2 * x2;
  r.lambda_up = eig.lambda1;
  r.c_low = 1.0 / std::sqrt(eig.lambda1);
  r.c_up = 1.0 / x2;
  r.c_avg = 0.5 * (r.c_low + r.c_up);
  r.rel_err = (r.c_up - r.c_low) / r.c_avg;
  const Diagnostics d = closeness_diagnostics(eig.lambda1, eig.lambda2, x2, spec.trust_factor);
  r.d1 = d.d1;
  r.d2 = d.d2;
  r.trusted = d.trusted;
  r.n_dof = static_cast<int>(eig.vector1.size());
  return r;
}

}  // namespace eigenbound
