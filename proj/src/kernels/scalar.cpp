#include "../quadrature.hpp"
#include "kernels_detail.hpp"

// Reference kernels. The AVX2 variants mirror these expression trees
// operation for operation; any edit here must be replicated there or the
// bitwise-equivalence tests fail.

namespace eigenbound::kernels::detail {

void residual_terms_scalar(const ElementBatch& b, const ResidualBatch& r,
                           int begin, int end, double* r2, double* s2) {
  const double sdiv = r.sdiv;
  for (int e = begin; e < end; ++e) {
    const double x0 = b.x0[e], y0 = b.y0[e];
    const double x1 = b.x1[e], y1 = b.y1[e];
    const double x2 = b.x2[e], y2 = b.y2[e];
    const double ar = b.area[e];
    const double cx = b.cx[e], cy = b.cy[e], isc = b.inv_scale[e];
    const double u0 = r.u0[e], u1 = r.u1[e], u2 = r.u2[e];

    const double inv2a = 1.0 / (2.0 * ar);
    const double gx = ((y1 - y2) * u0 + (y2 - y0) * u1 + (y0 - y1) * u2) * inv2a;
    const double gy = ((x2 - x1) * u0 + (x0 - x2) * u1 + (x1 - x0) * u2) * inv2a;
    const double hx = b.a11[e] * gx + b.a12[e] * gy;
    const double hy = b.a12[e] * gx + b.a22[e] * gy;
    const double i11 = b.i11[e], i12 = b.i12[e], i22 = b.i22[e];
    const double q0 = r.q[0][e], q1 = r.q[1][e], q2 = r.q[2][e], q3 = r.q[3][e];
    const double q4 = r.q[4][e], q5 = r.q[5][e], q6 = r.q[6][e], q7 = r.q[7][e];
    const double su = r.su[e];

    double racc = 0.0;
    double sacc = 0.0;
    for (int p = 0; p < quad::kTri4N; ++p) {
      const double b0 = quad::kTri4B[p][0];
      const double b1 = quad::kTri4B[p][1];
      const double b2 = quad::kTri4B[p][2];
      const double w = quad::kTri4W[p];
      const double px = b0 * x0 + b1 * x1 + b2 * x2;
      const double py = b0 * y0 + b1 * y1 + b2 * y2;
      const double up = b0 * u0 + b1 * u1 + b2 * u2;
      const double xi = (px - cx) * isc;
      const double eta = (py - cy) * isc;
      const double qx = q0 + q1 * xi + q2 * eta + q6 * (xi * xi) + q7 * (xi * eta);
      const double qy = q3 + q4 * xi + q5 * eta + q6 * (xi * eta) + q7 * (eta * eta);
      const double dq = (q1 + q5 + 3.0 * (q6 * xi + q7 * eta)) * isc;
      const double rx = hx - qx;
      const double ry = hy - qy;
      racc = racc + w * ((i11 * rx + i12 * ry) * rx + (i12 * rx + i22 * ry) * ry);
      const double s = su * up + sdiv * dq;
      sacc = sacc + w * (s * s);
    }
    r2[e] = ar * racc;
    s2[e] = ar * sacc;
  }
}

void p1_stiffness_scalar(const ElementBatch& b, int begin, int end,
                         double* s00, double* s01, double* s02,
                         double* s11, double* s12, double* s22) {
  for (int e = begin; e < end; ++e) {
    const double x0 = b.x0[e], y0 = b.y0[e];
    const double x1 = b.x1[e], y1 = b.y1[e];
    const double x2 = b.x2[e], y2 = b.y2[e];
    const double a11 = b.a11[e], a12 = b.a12[e], a22 = b.a22[e];
    // Unnormalized gradients: grad(phi_i) = g_i / (2 area).
    const double g0x = y1 - y2, g0y = x2 - x1;
    const double g1x = y2 - y0, g1y = x0 - x2;
    const double g2x = y0 - y1, g2y = x1 - x0;
    const double t0x = a11 * g0x + a12 * g0y, t0y = a12 * g0x + a22 * g0y;
    const double t1x = a11 * g1x + a12 * g1y, t1y = a12 * g1x + a22 * g1y;
    const double t2x = a11 * g2x + a12 * g2y, t2y = a12 * g2x + a22 * g2y;
    const double inv4a = 1.0 / (4.0 * b.area[e]);
    s00[e] = (g0x * t0x + g0y * t0y) * inv4a;
    s01[e] = (g0x * t1x + g0y * t1y) * inv4a;
    s02[e] = (g0x * t2x + g0y * t2y) * inv4a;
    s11[e] = (g1x * t1x + g1y * t1y) * inv4a;
    s12[e] = (g1x * t2x + g1y * t2y) * inv4a;
    s22[e] = (g2x * t2x + g2y * t2y) * inv4a;
  }
}

}  // namespace eigenbound::kernels::detail
