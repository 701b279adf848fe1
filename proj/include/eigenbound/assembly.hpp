#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "eigenbound/problem.hpp"

namespace eigenbound {

// Square sparse matrix that is symmetric by construction. The constructor
// verifies symmetry; assembly routines produce bitwise-symmetric triplet
// streams, so the check is exact.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  explicit SparseSymMatrix(Eigen::SparseMatrix<double> m);

  int dim() const { return static_cast<int>(m_.rows()); }
  std::int64_t nonzeros() const { return static_cast<std::int64_t>(m_.nonZeros()); }
  const Eigen::SparseMatrix<double>& matrix() const { return m_; }
  double trace() const { return m_.diagonal().sum(); }

  // MatrixMarket "coordinate real symmetric", lower triangle, 1-based,
  // 17 significant digits.
  void write_matrix_market(const std::string& path) const;
  static SparseSymMatrix read_matrix_market(const std::string& path);

 private:
  Eigen::SparseMatrix<double> m_;
};

// Bilinear form (A grad u, grad v) + (c u, v) + robin_alpha (u, v) on the
// Neumann boundary part; P1 hat functions over all mesh vertices.
SparseSymMatrix assemble_energy_matrix(const Mesh& mesh, const Coefficients& coeffs);

// Friedrichs/Poincare: domain mass (u, v). Trace: boundary mass on the
// Neumann part (zero rows elsewhere; positive semidefinite). Trace on a mesh
// without Neumann edges is a configuration error.
SparseSymMatrix assemble_target_matrix(const Mesh& mesh, ProblemKind kind);

// Vertex <-> retained-unknown numbering after removing Dirichlet vertices.
struct DofMap {
  std::vector<int> vertex_to_dof;  // -1 for eliminated vertices
  std::vector<int> dof_to_vertex;
  int n_dof = 0;
  int n_vertices = 0;
};

struct ReducedSystem {
  SparseSymMatrix K;
  SparseSymMatrix M;
  DofMap dofs;
};

// Removes rows/columns of vertices on Dirichlet edges (homogeneous data).
// Kinds without Dirichlet edges get the identity map. Zero unknowns left is
// an argument error.
ReducedSystem eliminate_dirichlet(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                  const Mesh& mesh);

// Extends a reduced vector to all vertices, zero on eliminated ones.
Eigen::VectorXd prolong_to_vertices(const Eigen::VectorXd& reduced, const DofMap& dofs);

}  // namespace eigenbound
