#include "eigenbound/flux.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>

#include "eigenbound/errors.hpp"
#include "quadrature.hpp"

namespace eigenbound {

namespace {

// Monomial values and physical divergences at a frame point.
void eval_monomials(double xi, double eta, double isc, double mx[8], double my[8], double dv[8]) {
  mx[0] = 1.0;      my[0] = 0.0;       dv[0] = 0.0;
  mx[1] = xi;       my[1] = 0.0;       dv[1] = isc;
  mx[2] = eta;      my[2] = 0.0;       dv[2] = 0.0;
  mx[3] = 0.0;      my[3] = 1.0;       dv[3] = 0.0;
  mx[4] = 0.0;      my[4] = xi;        dv[4] = 0.0;
  mx[5] = 0.0;      my[5] = eta;       dv[5] = isc;
  mx[6] = xi * xi;  my[6] = xi * eta;  dv[6] = 3.0 * xi * isc;
  mx[7] = xi * eta; my[7] = eta * eta; dv[7] = 3.0 * eta * isc;
}

// Global dof index per local slot, -1 for constrained edge moments.
std::array<std::int32_t, 8> local_dofs(const FluxSpace& s, int t) {
  std::array<std::int32_t, 8> ld;
  for (int i = 0; i < 3; ++i) {
    const std::int32_t g = s.tri_edges[t][i];
    if (s.constrained[g]) {
      ld[2 * i] = -1;
      ld[2 * i + 1] = -1;
    } else {
      ld[2 * i] = s.edge_dof[g];
      ld[2 * i + 1] = s.edge_dof[g] + 1;
    }
  }
  ld[6] = s.interior_base + 2 * t;
  ld[7] = s.interior_base + 2 * t + 1;
  return ld;
}

}  // namespace

FluxSpace build_flux_space(const Mesh& mesh, ProblemKind kind) {
  FluxSpace s;
  s.kind = kind;
  s.n_vertices = mesh.num_vertices();
  s.n_triangles = mesh.num_triangles();
  s.geom = kernels::build_geometry_batch(mesh);

  // Collect undirected edges, numbered in sorted vertex-pair order.
  std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> ids;
  for (const Triangle& tr : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      std::int32_t a = tr.v[i], b = tr.v[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      ids.emplace(std::make_pair(a, b), 0);
    }
  s.edges.reserve(ids.size());
  for (auto& [key, id] : ids) {
    id = static_cast<std::int32_t>(s.edges.size());
    s.edges.push_back({key.first, key.second});
  }

  s.tri_edges.resize(mesh.triangles.size());
  std::vector<std::array<std::int32_t, 2>> owners(s.edges.size(), {-1, -1});
  std::vector<std::array<std::int8_t, 2>> owner_local(s.edges.size(), {0, 0});
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      std::int32_t a = tr.v[i], b = tr.v[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      const std::int32_t g = ids.at({a, b});
      s.tri_edges[t][i] = g;
      auto& own = owners[g];
      if (own[0] < 0) {
        own[0] = t;
        owner_local[g][0] = static_cast<std::int8_t>(i);
      } else if (own[1] < 0) {
        own[1] = t;
        owner_local[g][1] = static_cast<std::int8_t>(i);
      } else {
        throw ArgumentError("flux space: edge shared by more than two triangles");
      }
    }
  }

  // Edge geometry in the v0 -> v1 orientation (normal = tangent rotated -90 deg).
  const std::size_t ne = s.edges.size();
  s.edge_nx.resize(ne);
  s.edge_ny.resize(ne);
  s.edge_len.resize(ne);
  s.edge_ax.resize(ne);
  s.edge_ay.resize(ne);
  s.edge_bx.resize(ne);
  s.edge_by.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Vec2& a = mesh.vertices[s.edges[e].v0];
    const Vec2& b = mesh.vertices[s.edges[e].v1];
    s.edge_ax[e] = a.x;
    s.edge_ay[e] = a.y;
    s.edge_bx[e] = b.x;
    s.edge_by[e] = b.y;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len = std::sqrt(dx * dx + dy * dy);
    s.edge_len[e] = len;
    s.edge_nx[e] = dy / len;
    s.edge_ny[e] = -dx / len;
  }

  // Boundary labels, the constraint set, and the Neumann edge list.
  std::map<std::pair<std::int32_t, std::int32_t>, BoundaryLabel> blab;
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    std::int32_t a = e.v0, b = e.v1;
    if (a > b) std::swap(a, b);
    blab.emplace(std::make_pair(a, b), e.label);
  }
  s.constrained.assign(ne, false);
  for (std::size_t e = 0; e < ne; ++e) {
    const bool boundary = owners[e][1] < 0;
    if (!boundary) continue;
    auto it = blab.find({s.edges[e].v0, s.edges[e].v1});
    if (it == blab.end())
      throw ArgumentError("flux space: boundary edge without a label (nonconforming mesh?)");
    const bool neum = it->second == BoundaryLabel::Neumann;
    if (kind == ProblemKind::Poincare)
      s.constrained[e] = true;
    else if (kind == ProblemKind::Friedrichs)
      s.constrained[e] = neum;
    if (neum) {
      FluxSpace::NeumannEdge n;
      n.edge = static_cast<std::int32_t>(e);
      n.tri = owners[e][0];
      n.local = owner_local[e][0];
      const double midx = 0.5 * (s.edge_ax[e] + s.edge_bx[e]);
      const double midy = 0.5 * (s.edge_ay[e] + s.edge_by[e]);
      const Vec2 c = mesh.centroid(n.tri);
      const double d = (midx - c.x) * s.edge_nx[e] + (midy - c.y) * s.edge_ny[e];
      n.sign = d > 0.0 ? 1.0 : -1.0;
      s.neumann.push_back(n);
    }
  }

  // Unknown numbering: unconstrained edges in sorted order, then interiors.
  s.edge_dof.assign(ne, -1);
  std::int32_t next = 0;
  for (std::size_t e = 0; e < ne; ++e)
    if (!s.constrained[e]) {
      s.edge_dof[e] = next;
      next += 2;
    }
  s.interior_base = next;
  s.n_dofs = next + 2 * mesh.num_triangles();

  // Local Vandermonde inverses: dof functionals applied to the monomials.
  s.vinv.resize(mesh.triangles.size());
  double mx[8], my[8], dv[8];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Eigen::Matrix<double, 8, 8> V = Eigen::Matrix<double, 8, 8>::Zero();
    const double cx = s.geom.cx[t], cy = s.geom.cy[t], isc = s.geom.inv_scale[t];
    for (int i = 0; i < 3; ++i) {
      const std::int32_t g = s.tri_edges[t][i];
      const double nx = s.edge_nx[g], ny = s.edge_ny[g];
      for (int p = 0; p < quad::kEdge3N; ++p) {
        const double sp = quad::kEdge3X[p];
        const double w = quad::kEdge3W[p];
        const double x = s.edge_ax[g] + sp * (s.edge_bx[g] - s.edge_ax[g]);
        const double y = s.edge_ay[g] + sp * (s.edge_by[g] - s.edge_ay[g]);
        eval_monomials((x - cx) * isc, (y - cy) * isc, isc, mx, my, dv);
        for (int j = 0; j < 8; ++j) {
          const double tn = mx[j] * nx + my[j] * ny;
          V(2 * i, j) += w * tn;
          V(2 * i + 1, j) += w * tn * (2.0 * sp - 1.0);
        }
      }
    }
    for (int p = 0; p < quad::kTri4N; ++p) {
      const double b0 = quad::kTri4B[p][0], b1 = quad::kTri4B[p][1], b2 = quad::kTri4B[p][2];
      const double w = quad::kTri4W[p];
      const double x = b0 * s.geom.x0[t] + b1 * s.geom.x1[t] + b2 * s.geom.x2[t];
      const double y = b0 * s.geom.y0[t] + b1 * s.geom.y1[t] + b2 * s.geom.y2[t];
      eval_monomials((x - cx) * isc, (y - cy) * isc, isc, mx, my, dv);
      for (int j = 0; j < 8; ++j) {
        V(6, j) += w * mx[j];
        V(7, j) += w * my[j];
      }
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(V);
    if (!lu.isInvertible())
      throw MatrixError("flux space: degenerate local basis on triangle " + std::to_string(t));
    s.vinv[t] = lu.inverse();
  }
  return s;
}

FluxSystem assemble_flux_system(const FluxSpace& space, const ProblemSpec& spec,
                                const EigenApprox& eig) {
  if (space.kind != spec.kind) throw ArgumentError("flux system: space built for a different kind");
  if (space.n_vertices != spec.mesh.num_vertices() ||
      space.n_triangles != spec.mesh.num_triangles())
    throw ArgumentError("flux system: space does not match the mesh");
  if (static_cast<int>(eig.vertex1.size()) != space.n_vertices)
    throw ArgumentError("flux system: eigenvector not prolonged to mesh vertices");
  const double lambda = eig.lambda1;
  if (!(lambda > 0.0)) throw ArgumentError("flux system: nonpositive eigenvalue approximation");

  const double rho = spec.rho;
  double cdd = 1.0, cmm = lambda / rho, cg1 = lambda / rho;
  if (spec.kind == ProblemKind::Trace) {
    if (!spec.friedrichs_upper.has_value())
      throw ConfigError("flux system: trace kind needs a certified domain constant");
    const double cf = *spec.friedrichs_upper;
    const double sig = spec.sigma;
    cdd = (1.0 + rho) / sig * lambda * cf * cf;
    cmm = (1.0 + rho) / (rho * sig) * lambda;
    cg1 = cmm;
  }

  kernels::ElementBatch batch = space.geom;
  kernels::attach_coefficients(batch, spec.mesh, spec.coefficients);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(space.n_triangles) * 64);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs);

  auto scatter = [&](int t, const Eigen::Matrix<double, 8, 8>& B,
                     const Eigen::Matrix<double, 8, 1>& F) {
    const Eigen::Matrix<double, 8, 8>& W = space.vinv[t];
    // W'BW is symmetric in exact arithmetic but its (j,k) and (k,j) entries
    // are different summation orders; average to restore bitwise symmetry.
    const Eigen::Matrix<double, 8, 8> Bw = W.transpose() * B * W;
    const Eigen::Matrix<double, 8, 8> Bd = 0.5 * (Bw + Bw.transpose());
    const Eigen::Matrix<double, 8, 1> Fd = W.transpose() * F;
    const std::array<std::int32_t, 8> ld = local_dofs(space, t);
    for (int j = 0; j < 8; ++j) {
      if (ld[j] < 0) continue;
      rhs[ld[j]] += Fd(j);
      for (int k = 0; k < 8; ++k)
        if (ld[k] >= 0) trip.emplace_back(ld[j], ld[k], Bd(j, k));
    }
  };

  double mx[8], my[8], dv[8];
  for (int t = 0; t < space.n_triangles; ++t) {
    const auto& v = spec.mesh.triangles[t].v;
    const double uv0 = eig.vertex1[v[0]], uv1 = eig.vertex1[v[1]], uv2 = eig.vertex1[v[2]];
    const double ar = batch.area[t];
    const double cx = batch.cx[t], cy = batch.cy[t], isc = batch.inv_scale[t];
    const double i11 = batch.i11[t], i12 = batch.i12[t], i22 = batch.i22[t];
    const double react = batch.react[t];
    const double x0 = batch.x0[t], y0 = batch.y0[t];
    const double x1 = batch.x1[t], y1 = batch.y1[t];
    const double x2 = batch.x2[t], y2 = batch.y2[t];
    const double inv2a = 1.0 / (2.0 * ar);
    const double gx = ((y1 - y2) * uv0 + (y2 - y0) * uv1 + (y0 - y1) * uv2) * inv2a;
    const double gy = ((x2 - x1) * uv0 + (x0 - x2) * uv1 + (x1 - x0) * uv2) * inv2a;
    // scalar multiplying u against div w in the linear functional
    const double su = (spec.kind == ProblemKind::Trace) ? cdd * react : -(lambda - react);

    Eigen::Matrix<double, 8, 8> B = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> F = Eigen::Matrix<double, 8, 1>::Zero();
    for (int p = 0; p < quad::kTri4N; ++p) {
      const double b0 = quad::kTri4B[p][0], b1 = quad::kTri4B[p][1], b2 = quad::kTri4B[p][2];
      const double w = ar * quad::kTri4W[p];
      const double x = b0 * x0 + b1 * x1 + b2 * x2;
      const double y = b0 * y0 + b1 * y1 + b2 * y2;
      const double up = b0 * uv0 + b1 * uv1 + b2 * uv2;
      eval_monomials((x - cx) * isc, (y - cy) * isc, isc, mx, my, dv);
      for (int j = 0; j < 8; ++j) {
        const double ajx = i11 * mx[j] + i12 * my[j];
        const double ajy = i12 * mx[j] + i22 * my[j];
        for (int k = j; k < 8; ++k) {
          const double val = w * (cdd * dv[j] * dv[k] + cmm * (ajx * mx[k] + ajy * my[k]));
          B(j, k) += val;
          if (k != j) B(k, j) += val;
        }
        F(j) += w * (cg1 * (gx * mx[j] + gy * my[j]) + su * up * dv[j]);
      }
    }
    scatter(t, B, F);
  }

  // Trace kind: normal-trace mass and data terms on the Neumann boundary.
  if (spec.kind == ProblemKind::Trace) {
    const double alpha = spec.coefficients.robin_alpha;
    for (const FluxSpace::NeumannEdge& nb : space.neumann) {
      const int t = nb.tri;
      const std::int32_t g = nb.edge;
      const double ua = eig.vertex1[space.edges[g].v0];
      const double ub = eig.vertex1[space.edges[g].v1];
      const double nx = space.edge_nx[g] * nb.sign;
      const double ny = space.edge_ny[g] * nb.sign;
      const double len = space.edge_len[g];
      const double cx = batch.cx[t], cy = batch.cy[t], isc = batch.inv_scale[t];

      Eigen::Matrix<double, 8, 8> B = Eigen::Matrix<double, 8, 8>::Zero();
      Eigen::Matrix<double, 8, 1> F = Eigen::Matrix<double, 8, 1>::Zero();
      for (int p = 0; p < quad::kEdge3N; ++p) {
        const double sp = quad::kEdge3X[p];
        const double w = len * quad::kEdge3W[p];
        const double x = space.edge_ax[g] + sp * (space.edge_bx[g] - space.edge_ax[g]);
        const double y = space.edge_ay[g] + sp * (space.edge_by[g] - space.edge_ay[g]);
        const double up = (1.0 - sp) * ua + sp * ub;
        eval_monomials((x - cx) * isc, (y - cy) * isc, isc, mx, my, dv);
        for (int j = 0; j < 8; ++j) {
          const double tj = mx[j] * nx + my[j] * ny;
          for (int k = j; k < 8; ++k) {
            const double tk = mx[k] * nx + my[k] * ny;
            B(j, k) += w * tj * tk;
            if (k != j) B(k, j) += w * tj * tk;
          }
          F(j) += w * (lambda - alpha) * up * tj;
        }
      }
      scatter(t, B, F);
    }
  }

  Eigen::SparseMatrix<double> Bmat(space.n_dofs, space.n_dofs);
  Bmat.setFromTriplets(trip.begin(), trip.end());
  return {SparseSymMatrix(std::move(Bmat)), std::move(rhs)};
}

Eigen::VectorXd solve_spd(const SparseSymMatrix& A, const Eigen::VectorXd& b) {
  if (A.dim() != b.size()) throw ArgumentError("solve_spd: dimension mismatch");
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A.matrix());
  if (llt.info() != Eigen::Success)
    throw MatrixError("solve_spd: Cholesky factorization failed (matrix not positive definite?)");
  Eigen::VectorXd x = llt.solve(b);
  const double scale = b.norm();
  if (scale > 0.0) {
    const double res = (b - A.matrix() * x).norm();
    if (!(res <= 1e-10 * scale))
      throw MatrixError("solve_spd: solution failed the residual check");
  }
  return x;
}

FluxMonomials monomialize(const FluxField& field) {
  const FluxSpace& s = *field.space;
  if (field.coefficients.size() != s.n_dofs)
    throw ArgumentError("monomialize: coefficient vector does not match the space");
  FluxMonomials out;
  for (int j = 0; j < 8; ++j) out.q[j].resize(s.n_triangles);
  for (int t = 0; t < s.n_triangles; ++t) {
    Eigen::Matrix<double, 8, 1> d = Eigen::Matrix<double, 8, 1>::Zero();
    const std::array<std::int32_t, 8> ld = local_dofs(s, t);
    for (int j = 0; j < 8; ++j)
      if (ld[j] >= 0) d(j) = field.coefficients[ld[j]];
    const Eigen::Matrix<double, 8, 1> c = s.vinv[t] * d;
    for (int j = 0; j < 8; ++j) out.q[j][t] = c(j);
  }
  return out;
}

Eigen::Vector2d flux_value(const FluxSpace& space, const FluxMonomials& mono, int tri,
                           double x, double y) {
  const double isc = space.geom.inv_scale[tri];
  const double xi = (x - space.geom.cx[tri]) * isc;
  const double eta = (y - space.geom.cy[tri]) * isc;
  double q[8];
  for (int j = 0; j < 8; ++j) q[j] = mono.q[j][tri];
  return {q[0] + q[1] * xi + q[2] * eta + q[6] * (xi * xi) + q[7] * (xi * eta),
          q[3] + q[4] * xi + q[5] * eta + q[6] * (xi * eta) + q[7] * (eta * eta)};
}

double flux_divergence(const FluxSpace& space, const FluxMonomials& mono, int tri,
                       double x, double y) {
  const double isc = space.geom.inv_scale[tri];
  const double xi = (x - space.geom.cx[tri]) * isc;
  const double eta = (y - space.geom.cy[tri]) * isc;
  return (mono.q[1][tri] + mono.q[5][tri] + 3.0 * (mono.q[6][tri] * xi + mono.q[7][tri] * eta)) *
         isc;
}

FluxFields flux_fields(const FluxField& field) {
  const FluxSpace& s = *field.space;
  const FluxMonomials mono = monomialize(field);
  FluxFields out;
  out.divergence.resize(static_cast<std::size_t>(s.n_triangles));
  for (int t = 0; t < s.n_triangles; ++t) {
    const double isc = s.geom.inv_scale[t];
    out.divergence[t] = {(mono.q[1][t] + mono.q[5][t]) * isc, 3.0 * mono.q[6][t] * isc,
                         3.0 * mono.q[7][t] * isc};
  }
  out.neumann_normal_trace.resize(s.neumann.size());
  for (std::size_t i = 0; i < s.neumann.size(); ++i) {
    const FluxSpace::NeumannEdge& nb = s.neumann[i];
    const std::int32_t g = nb.edge;
    const double nx = s.edge_nx[g] * nb.sign, ny = s.edge_ny[g] * nb.sign;
    auto kval = [&](double sp) {
      const double x = s.edge_ax[g] + sp * (s.edge_bx[g] - s.edge_ax[g]);
      const double y = s.edge_ay[g] + sp * (s.edge_by[g] - s.edge_ay[g]);
      const Eigen::Vector2d qv = flux_value(s, mono, nb.tri, x, y);
      return qv.x() * nx + qv.y() * ny;
    };
    const double k0 = kval(0.0), kh = kval(0.5), k1 = kval(1.0);
    out.neumann_normal_trace[i] = {k0, -3.0 * k0 + 4.0 * kh - k1, 2.0 * k0 - 4.0 * kh + 2.0 * k1};
  }
  return out;
}

Eigen::VectorXd interpolate_flux(const FluxSpace& space,
                                 const std::function<Eigen::Vector2d(double, double)>& f) {
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(space.n_dofs);
  for (std::size_t e = 0; e < space.edges.size(); ++e) {
    if (space.constrained[e]) continue;
    const double nx = space.edge_nx[e], ny = space.edge_ny[e];
    double m0 = 0.0, m1 = 0.0;
    for (int p = 0; p < quad::kEdge3N; ++p) {
      const double sp = quad::kEdge3X[p];
      const double w = quad::kEdge3W[p];
      const double x = space.edge_ax[e] + sp * (space.edge_bx[e] - space.edge_ax[e]);
      const double y = space.edge_ay[e] + sp * (space.edge_by[e] - space.edge_ay[e]);
      const Eigen::Vector2d q = f(x, y);
      const double tn = q.x() * nx + q.y() * ny;
      m0 += w * tn;
      m1 += w * tn * (2.0 * sp - 1.0);
    }
    dofs[space.edge_dof[e]] = m0;
    dofs[space.edge_dof[e] + 1] = m1;
  }
  for (int t = 0; t < space.n_triangles; ++t) {
    double vx = 0.0, vy = 0.0;
    for (int p = 0; p < quad::kTri4N; ++p) {
      const double b0 = quad::kTri4B[p][0], b1 = quad::kTri4B[p][1], b2 = quad::kTri4B[p][2];
      const double w = quad::kTri4W[p];
      const double x = b0 * space.geom.x0[t] + b1 * space.geom.x1[t] + b2 * space.geom.x2[t];
      const double y = b0 * space.geom.y0[t] + b1 * space.geom.y1[t] + b2 * space.geom.y2[t];
      const Eigen::Vector2d q = f(x, y);
      vx += w * q.x();
      vy += w * q.y();
    }
    dofs[space.interior_base + 2 * t] = vx;
    dofs[space.interior_base + 2 * t + 1] = vy;
  }
  return dofs;
}

}  // namespace eigenbound
