#include "eigenbound/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eigenbound/errors.hpp"
#include "eigenbound/kernels.hpp"

namespace eigenbound {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double edge_length(const Mesh& mesh, const BoundaryEdge& e) {
  const Vec2& a = mesh.vertices[e.v0];
  const Vec2& b = mesh.vertices[e.v1];
  return std::sqrt((b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y));
}

// |e|/6 * [[2,1],[1,2]] times coef, appended symmetrically.
void add_edge_mass(std::vector<Eigen::Triplet<double>>& trip, const Mesh& mesh,
                   const BoundaryEdge& e, double coef) {
  const double len = edge_length(mesh, e);
  const double d = coef * (len / 3.0);
  const double o = coef * (len / 6.0);
  trip.emplace_back(e.v0, e.v0, d);
  trip.emplace_back(e.v1, e.v1, d);
  trip.emplace_back(e.v0, e.v1, o);
  trip.emplace_back(e.v1, e.v0, o);
}

}  // namespace

SparseSymMatrix::SparseSymMatrix(Eigen::SparseMatrix<double> m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw MatrixError("matrix is not square");
  Eigen::SparseMatrix<double> mt = m_.transpose();
  const Eigen::SparseMatrix<double> diff = m_ - mt;
  if (diff.squaredNorm() != 0.0) throw MatrixError("matrix is not symmetric");
}

void SparseSymMatrix::write_matrix_market(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  std::int64_t lower = 0;
  for (int k = 0; k < m_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m_, k); it; ++it)
      if (it.row() >= it.col()) ++lower;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << m_.rows() << ' ' << m_.cols() << ' ' << lower << '\n';
  for (int k = 0; k < m_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m_, k); it; ++it)
      if (it.row() >= it.col())
        os << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << fmt17(it.value()) << '\n';
  if (!os) throw ArgumentError("write to '" + path + "' failed");
}

SparseSymMatrix SparseSymMatrix::read_matrix_market(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0 ||
      line.find("symmetric") == std::string::npos)
    throw ArgumentError("'" + path + "' is not a symmetric MatrixMarket file");
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream head(line);
  std::int64_t rows = 0, cols = 0, nnz = 0;
  if (!(head >> rows >> cols >> nnz) || rows != cols)
    throw ArgumentError("'" + path + "': bad size header");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nnz) * 2);
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int64_t i = 0, j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v)) throw ArgumentError("'" + path + "': truncated entry list");
    trip.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (i != j) trip.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
  }
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return SparseSymMatrix(std::move(m));
}

SparseSymMatrix assemble_energy_matrix(const Mesh& mesh, const Coefficients& coeffs) {
  kernels::ElementBatch batch = kernels::build_geometry_batch(mesh);
  kernels::attach_coefficients(batch, mesh, coeffs);
  const int nt = batch.n;
  std::vector<double> s00(nt), s01(nt), s02(nt), s11(nt), s12(nt), s22(nt);
  kernels::p1_stiffness(batch, s00.data(), s01.data(), s02.data(),
                        s11.data(), s12.data(), s22.data());

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nt) * 9 + mesh.boundary_edges.size() * 4);
  for (int e = 0; e < nt; ++e) {
    const auto& v = mesh.triangles[e].v;
    // diffusion + reaction mass (area/12 * [[2,1,1],[1,2,1],[1,1,2]])
    const double cm = batch.react[e] * (batch.area[e] / 12.0);
    const double diag = 2.0 * cm;
    trip.emplace_back(v[0], v[0], s00[e] + diag);
    trip.emplace_back(v[1], v[1], s11[e] + diag);
    trip.emplace_back(v[2], v[2], s22[e] + diag);
    trip.emplace_back(v[0], v[1], s01[e] + cm);
    trip.emplace_back(v[1], v[0], s01[e] + cm);
    trip.emplace_back(v[0], v[2], s02[e] + cm);
    trip.emplace_back(v[2], v[0], s02[e] + cm);
    trip.emplace_back(v[1], v[2], s12[e] + cm);
    trip.emplace_back(v[2], v[1], s12[e] + cm);
  }
  if (coeffs.robin_alpha != 0.0)
    for (const BoundaryEdge& e : mesh.boundary_edges)
      if (e.label == BoundaryLabel::Neumann) add_edge_mass(trip, mesh, e, coeffs.robin_alpha);

  Eigen::SparseMatrix<double> K(mesh.num_vertices(), mesh.num_vertices());
  K.setFromTriplets(trip.begin(), trip.end());
  return SparseSymMatrix(std::move(K));
}

SparseSymMatrix assemble_target_matrix(const Mesh& mesh, ProblemKind kind) {
  std::vector<Eigen::Triplet<double>> trip;
  if (kind == ProblemKind::Trace) {
    bool any = false;
    for (const BoundaryEdge& e : mesh.boundary_edges)
      if (e.label == BoundaryLabel::Neumann) {
        add_edge_mass(trip, mesh, e, 1.0);
        any = true;
      }
    if (!any) throw ConfigError("trace kind needs a Neumann boundary part");
  } else {
    trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& v = mesh.triangles[t].v;
      const double m = mesh.triangle_area(t) / 12.0;
      const double d = 2.0 * m;
      trip.emplace_back(v[0], v[0], d);
      trip.emplace_back(v[1], v[1], d);
      trip.emplace_back(v[2], v[2], d);
      trip.emplace_back(v[0], v[1], m);
      trip.emplace_back(v[1], v[0], m);
      trip.emplace_back(v[0], v[2], m);
      trip.emplace_back(v[2], v[0], m);
      trip.emplace_back(v[1], v[2], m);
      trip.emplace_back(v[2], v[1], m);
    }
  }
  Eigen::SparseMatrix<double> M(mesh.num_vertices(), mesh.num_vertices());
  M.setFromTriplets(trip.begin(), trip.end());
  return SparseSymMatrix(std::move(M));
}

ReducedSystem eliminate_dirichlet(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                  const Mesh& mesh) {
  if (K.dim() != mesh.num_vertices() || M.dim() != mesh.num_vertices())
    throw ArgumentError("eliminate_dirichlet: matrix dimensions do not match the mesh");
  const std::vector<bool> drop = mesh.dirichlet_vertex_mask();

  ReducedSystem out;
  out.dofs.n_vertices = mesh.num_vertices();
  out.dofs.vertex_to_dof.assign(mesh.vertices.size(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!drop[v]) {
      out.dofs.vertex_to_dof[v] = out.dofs.n_dof++;
      out.dofs.dof_to_vertex.push_back(v);
    }
  if (out.dofs.n_dof == 0) throw ArgumentError("eliminate_dirichlet: no unknowns remain");

  auto reduce = [&](const SparseSymMatrix& A) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A.nonzeros()));
    const Eigen::SparseMatrix<double>& m = A.matrix();
    for (int k = 0; k < m.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
        const int i = out.dofs.vertex_to_dof[it.row()];
        const int j = out.dofs.vertex_to_dof[it.col()];
        if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
      }
    Eigen::SparseMatrix<double> r(out.dofs.n_dof, out.dofs.n_dof);
    r.setFromTriplets(trip.begin(), trip.end());
    return SparseSymMatrix(std::move(r));
  };
  out.K = reduce(K);
  out.M = reduce(M);
  return out;
}

Eigen::VectorXd prolong_to_vertices(const Eigen::VectorXd& reduced, const DofMap& dofs) {
  if (reduced.size() != dofs.n_dof)
    throw ArgumentError("prolong_to_vertices: vector does not match the unknown count");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dofs.n_vertices);
  for (int i = 0; i < dofs.n_dof; ++i) full[dofs.dof_to_vertex[i]] = reduced[i];
  return full;
}

}  // namespace eigenbound
