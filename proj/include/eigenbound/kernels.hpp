#pragma once

#include <string>
#include <vector>

#include "eigenbound/mesh.hpp"
#include "eigenbound/problem.hpp"

// Per-element quadrature loops, structure-of-arrays. Each kernel has a
// scalar reference implementation and an AVX2 variant selected at runtime;
// both evaluate the same expression tree in the same order (no FMA, project
// built with -ffp-contract=off), so their outputs are bit-identical and the
// equivalence tests compare exact bits. Element-loop parallelism is capped
// by EIGENBOUND_THREADS; outputs are written to disjoint slots, so the
// thread count never changes results.

namespace eigenbound::kernels {

enum class Isa { Scalar, Avx2 };

// Resolved once per process: EIGENBOUND_KERNELS=scalar|avx2|auto overrides
// CPU detection. Requesting avx2 on a CPU without it is a config error.
Isa active_isa();
std::string isa_name(Isa isa);
// Test hook; throws ConfigError when the ISA is unavailable.
void force_isa(Isa isa);

// EIGENBOUND_THREADS (default 1), clamped to [1, hardware_concurrency].
int thread_count();

// Geometry and coefficient data per element.
struct ElementBatch {
  int n = 0;
  // vertex coordinates
  std::vector<double> x0, y0, x1, y1, x2, y2;
  std::vector<double> area;
  // local frame of the flux monomials: xi = (x - cx) * inv_scale
  std::vector<double> cx, cy, inv_scale;
  // diffusion, inverse diffusion, reaction (filled by attach_coefficients)
  std::vector<double> a11, a12, a22;
  std::vector<double> i11, i12, i22;
  std::vector<double> react;
};

ElementBatch build_geometry_batch(const Mesh& mesh);
void attach_coefficients(ElementBatch& batch, const Mesh& mesh, const Coefficients& coeffs);

// Inputs of the residual kernel beyond the batch: the flux in per-element
// monomial form, the P1 field at the element vertices, and the scalar-term
// data. On element K with frame (xi, eta) the flux components are
//   qx = q0 + q1 xi + q2 eta + q6 xi^2 + q7 xi eta
//   qy = q3 + q4 xi + q5 eta + q6 xi eta + q7 eta^2
// and div q = (q1 + q5 + 3 (q6 xi + q7 eta)) * inv_scale.
struct ResidualBatch {
  std::vector<double> q[8];
  std::vector<double> u0, u1, u2;
  std::vector<double> su;  // per-element coefficient of u in the scalar term
  double sdiv = 1.0;       // global coefficient of div q in the scalar term
};

// Per element K:
//   r2[K] = integral over K of (A grad u - q)^T A^{-1} (A grad u - q)
//   s2[K] = integral over K of (su u + sdiv div q)^2
// (degree-4 rule; exact for these integrands).
void residual_terms(const ElementBatch& batch, const ResidualBatch& rhs,
                    double* r2, double* s2);

// P1 stiffness entries s_ij = area * grad(phi_i)^T A grad(phi_j); the six
// distinct entries of the symmetric 3x3 element matrix.
void p1_stiffness(const ElementBatch& batch,
                  double* s00, double* s01, double* s02,
                  double* s11, double* s12, double* s22);

}  // namespace eigenbound::kernels
