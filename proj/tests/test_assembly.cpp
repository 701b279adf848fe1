#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "eigenbound/assembly.hpp"
#include "eigenbound/errors.hpp"
#include "eigenbound/mesh.hpp"
#include "eigenbound/mesh_io.hpp"
#include "oracles.hpp"

using namespace eigenbound;
using doctest::Approx;

namespace {

Mesh unit_right_triangle() {
  const std::string path = "/tmp/eigenbound_test_tri.txt";
  std::ofstream out(path);
  out << "3 1 3\n0 0\n1 0\n0 1\n0 1 2 0\n0 1 dirichlet\n1 2 dirichlet\n2 0 dirichlet\n";
  out.close();
  Mesh m = read_mesh_text(path);
  std::remove(path.c_str());
  return m;
}

Coefficients identity_coeffs() {
  Coefficients c;
  c.diffusion = {Eigen::Matrix2d::Identity()};
  c.reaction = {0.0};
  return c;
}

SquareBoundaryRule friedrichs_rule() {
  return {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann, BoundaryLabel::Dirichlet,
          BoundaryLabel::Dirichlet};
}

Coefficients checkerboard(double contrast) {
  Coefficients c;
  c.diffusion = {Eigen::Matrix2d::Identity(), contrast * Eigen::Matrix2d::Identity()};
  c.reaction = {0.0, 0.0};
  return c;
}

}  // namespace

TEST_CASE("P1 stiffness on the unit right triangle") {
  const Mesh m = unit_right_triangle();
  const SparseSymMatrix K = assemble_energy_matrix(m, identity_coeffs());
  const Eigen::MatrixXd D = Eigen::MatrixXd(K.matrix());
  // gradients (-1,-1), (1,0), (0,1), area 1/2 -> all entries dyadic
  CHECK(D(0, 0) == 1.0);
  CHECK(D(0, 1) == -0.5);
  CHECK(D(0, 2) == -0.5);
  CHECK(D(1, 1) == 0.5);
  CHECK(D(1, 2) == 0.0);
  CHECK(D(2, 2) == 0.5);
  CHECK(D(1, 0) == D(0, 1));
}

TEST_CASE("anisotropic diffusion stiffness matches the hand formula") {
  const Mesh m = unit_right_triangle();
  Coefficients c;
  Eigen::Matrix2d a;
  a << 2.0, 0.5, 0.5, 1.0;
  c.diffusion = {a};
  c.reaction = {0.0};
  const Eigen::MatrixXd D = Eigen::MatrixXd(assemble_energy_matrix(m, c).matrix());
  const Eigen::Vector2d g0(-1, -1), g1(1, 0), g2(0, 1);
  const Eigen::Vector2d g[3] = {g0, g1, g2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(D(i, j) == Approx(0.5 * g[i].dot(a * g[j])).epsilon(1e-15));
}

TEST_CASE("reaction term adds the exact P1 mass matrix") {
  const Mesh m = unit_right_triangle();
  Coefficients c = identity_coeffs();
  c.reaction = {1.0};
  const Eigen::MatrixXd with = Eigen::MatrixXd(assemble_energy_matrix(m, c).matrix());
  const Eigen::MatrixXd without =
      Eigen::MatrixXd(assemble_energy_matrix(m, identity_coeffs()).matrix());
  const Eigen::MatrixXd mass = with - without;
  const double s = 0.5 / 12.0;  // area / 12
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(mass(i, j) == Approx(s * (i == j ? 2.0 : 1.0)).epsilon(1e-15));
}

TEST_CASE("domain mass matrix") {
  const Mesh m = unit_right_triangle();
  const Eigen::MatrixXd M =
      Eigen::MatrixXd(assemble_target_matrix(m, ProblemKind::Friedrichs).matrix());
  const double s = 0.5 / 12.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(M(i, j) == Approx(s * (i == j ? 2.0 : 1.0)).epsilon(1e-15));
  // Poincare uses the same domain mass
  const Eigen::MatrixXd P =
      Eigen::MatrixXd(assemble_target_matrix(m, ProblemKind::Poincare).matrix());
  CHECK((M - P).norm() == 0.0);
}

TEST_CASE("trace target is the Neumann boundary mass") {
  const Mesh m = build_initial_mesh(friedrichs_rule());
  const Eigen::MatrixXd M =
      Eigen::MatrixXd(assemble_target_matrix(m, ProblemKind::Trace).matrix());
  // Neumann edges (1,5) and (5,2), both of length 1: blocks |e|/6 [[2,1],[1,2]]
  CHECK(M(1, 1) == Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(M(2, 2) == Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(M(5, 5) == Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK(M(1, 5) == Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(M(5, 2) == Approx(1.0 / 6.0).epsilon(1e-15));
  // zero rows away from the Neumann side
  for (int v : {0, 3, 4, 6, 7, 8}) CHECK(M.row(v).norm() == 0.0);

  // no Neumann part -> no trace problem
  const Mesh all_d = build_initial_mesh(SquareBoundaryRule{});
  CHECK_THROWS_AS(assemble_target_matrix(all_d, ProblemKind::Trace), ConfigError);
}

TEST_CASE("robin boundary term scales the Neumann boundary mass") {
  const Mesh m = build_initial_mesh(friedrichs_rule());
  Coefficients c = checkerboard(1.0);
  c.robin_alpha = 2.0;
  const Eigen::MatrixXd with = Eigen::MatrixXd(assemble_energy_matrix(m, c).matrix());
  c.robin_alpha = 0.0;
  const Eigen::MatrixXd without = Eigen::MatrixXd(assemble_energy_matrix(m, c).matrix());
  const Eigen::MatrixXd bmass =
      Eigen::MatrixXd(assemble_target_matrix(m, ProblemKind::Trace).matrix());
  CHECK((with - without - 2.0 * bmass).norm() <= 1e-15 * bmass.norm());
}

TEST_CASE("all-Dirichlet reduction leaves the center unknown") {
  const Mesh m = build_initial_mesh(SquareBoundaryRule{});
  const SparseSymMatrix K = assemble_energy_matrix(m, checkerboard(1.0));
  const SparseSymMatrix M = assemble_target_matrix(m, ProblemKind::Friedrichs);
  const ReducedSystem red = eliminate_dirichlet(K, M, m);
  REQUIRE(red.K.dim() == 1);
  CHECK(red.dofs.dof_to_vertex == std::vector<int>{8});
  CHECK(Eigen::MatrixXd(red.K.matrix())(0, 0) == 4.0);
  CHECK(Eigen::MatrixXd(red.M.matrix())(0, 0) == Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("dirichlet elimination and prolongation") {
  const Mesh m = build_initial_mesh(friedrichs_rule());
  const SparseSymMatrix K = assemble_energy_matrix(m, checkerboard(1.0));
  const SparseSymMatrix M = assemble_target_matrix(m, ProblemKind::Friedrichs);
  const ReducedSystem red = eliminate_dirichlet(K, M, m);
  REQUIRE(red.K.dim() == 2);
  CHECK(red.dofs.dof_to_vertex == std::vector<int>{5, 8});
  CHECK(red.dofs.vertex_to_dof[5] == 0);
  CHECK(red.dofs.vertex_to_dof[8] == 1);
  CHECK(red.dofs.vertex_to_dof[0] == -1);

  Eigen::VectorXd v(2);
  v << 3.0, -7.0;
  const Eigen::VectorXd full = prolong_to_vertices(v, red.dofs);
  REQUIRE(full.size() == 9);
  CHECK(full[5] == 3.0);
  CHECK(full[8] == -7.0);
  CHECK(full.lpNorm<1>() == 10.0);

  // Poincare: nothing eliminated
  const Mesh mp = build_initial_mesh(
      {BoundaryLabel::Neumann, BoundaryLabel::Neumann, BoundaryLabel::Neumann,
       BoundaryLabel::Neumann});
  const SparseSymMatrix Kp = assemble_energy_matrix(mp, checkerboard(1.0));
  const SparseSymMatrix Mp = assemble_target_matrix(mp, ProblemKind::Poincare);
  const ReducedSystem rp = eliminate_dirichlet(Kp, Mp, mp);
  CHECK(rp.K.dim() == 9);

  // Poincare energy matrix annihilates constants
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(9);
  CHECK((Kp.matrix() * ones).norm() <= 1e-12);
}

TEST_CASE("eliminating every vertex is refused") {
  const Mesh m = unit_right_triangle();  // all three vertices on Dirichlet edges
  const SparseSymMatrix K = assemble_energy_matrix(m, identity_coeffs());
  const SparseSymMatrix M = assemble_target_matrix(m, ProblemKind::Friedrichs);
  CHECK_THROWS_AS(eliminate_dirichlet(K, M, m), ArgumentError);
}

TEST_CASE("matrix market round trip") {
  Mesh m = build_initial_mesh(friedrichs_rule());
  m = refine(m, {0, 2, 4});
  const SparseSymMatrix K = assemble_energy_matrix(m, checkerboard(10.0));
  const std::string path = "/tmp/eigenbound_test_K.mtx";
  K.write_matrix_market(path);
  const SparseSymMatrix R = SparseSymMatrix::read_matrix_market(path);
  REQUIRE(R.dim() == K.dim());
  CHECK(R.nonzeros() == K.nonzeros());
  CHECK((R.matrix() - K.matrix()).squaredNorm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("asymmetric input is rejected") {
  Eigen::SparseMatrix<double> m(2, 2);
  m.insert(0, 1) = 1.0;
  m.makeCompressed();
  CHECK_THROWS_AS(SparseSymMatrix{m}, MatrixError);
}

TEST_CASE("coefficient validation") {
  const Mesh m = unit_right_triangle();
  Coefficients c;
  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  c.diffusion = {bad};
  c.reaction = {0.0};
  CHECK_THROWS_AS(assemble_energy_matrix(m, c), CoefficientError);

  Coefficients missing;  // region 0 has no entry
  CHECK_THROWS_AS(assemble_energy_matrix(m, missing), CoefficientError);
}
