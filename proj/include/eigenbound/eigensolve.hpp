#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "eigenbound/assembly.hpp"

namespace eigenbound {

// Approximation of the two smallest eigenpairs of K y = lambda M y over the
// retained unknowns. lambda1 is a guaranteed upper bound for the continuous
// principal eigenvalue (Galerkin on a subspace, value recomputed as the
// Rayleigh quotient of the returned vector). vertex1 is vector1 extended to
// all mesh vertices (fill with prolong_to_vertices); routines downstream
// require it.
struct EigenApprox {
  double lambda1 = 0.0;
  double lambda2 = std::numeric_limits<double>::infinity();
  Eigen::VectorXd vector1;   // M-normalized, largest-magnitude entry positive
  Eigen::VectorXd vertex1;
  double normalization = 1.0;  // sqrt(vector1' M vector1), ~1 by construction
  double residual1 = 0.0;      // ||K v - lambda1 M v|| / ||K v||
};

// Shift-invert Lanczos with full reorthogonalization in the M inner product,
// one eigenpair per pass (converged vectors are deflated), backed by a
// sparse Cholesky factorization. count is 1 or 2. deflate_constant, when
// given, names a known kernel vector of K (the constant function for the
// all-Neumann kind); the pencil is shifted by s = 1e-8 trace(K)/n and the
// iteration kept M-orthogonal to it, so the smallest reported eigenvalue is
// the smallest positive one. A pencil whose finite spectrum is exhausted
// before `count` pairs (semidefinite M of low rank) reports lambda2 = inf.
// Errors: K not positive definite (after shift) -> MatrixError; iteration
// budget of 10000 operator applications exhausted -> ConvergenceError;
// M with no positive diagonal mass -> MatrixError.
EigenApprox smallest_eigenpairs(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                int count,
                                const Eigen::VectorXd* deflate_constant = nullptr);

// Dense reference solver for cross-checking: reduces to Eigen's generalized
// symmetric solver, with the roles inverted (solve M y = mu K y, reciprocate)
// when M is only semidefinite, and a Householder reduction onto the
// complement of the deflated vector when one is given. Returns all finite
// eigenvalues ascending. Dimensions above 2000 are refused (ArgumentError).
std::vector<double> dense_oracle(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                 const Eigen::VectorXd* deflate_constant = nullptr);

// One value per line, 17 significant digits.
void write_eigenvalues_text(const std::vector<double>& values, const std::string& path);

}  // namespace eigenbound
