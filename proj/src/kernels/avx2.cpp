#if defined(__x86_64__)

#include <immintrin.h>

#include "../quadrature.hpp"
#include "kernels_detail.hpp"

// Four elements per iteration, remainder through the scalar kernel. Only
// add/sub/mul/div intrinsics are used (no FMA) and every expression follows
// the scalar kernel's evaluation order, so each lane computes exactly the
// scalar result.

namespace eigenbound::kernels::detail {

namespace {
inline __m256d ld(const std::vector<double>& v, int e) { return _mm256_loadu_pd(v.data() + e); }
}  // namespace

__attribute__((target("avx2")))
void residual_terms_avx2(const ElementBatch& b, const ResidualBatch& r,
                         int begin, int end, double* r2, double* s2) {
  const int vend = begin + ((end - begin) / 4) * 4;
  const __m256d vsdiv = _mm256_set1_pd(r.sdiv);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d three = _mm256_set1_pd(3.0);
  int e = begin;
  for (; e < vend; e += 4) {
    const __m256d x0 = ld(b.x0, e), y0 = ld(b.y0, e);
    const __m256d x1 = ld(b.x1, e), y1 = ld(b.y1, e);
    const __m256d x2 = ld(b.x2, e), y2 = ld(b.y2, e);
    const __m256d ar = ld(b.area, e);
    const __m256d cx = ld(b.cx, e), cy = ld(b.cy, e), isc = ld(b.inv_scale, e);
    const __m256d u0 = ld(r.u0, e), u1 = ld(r.u1, e), u2 = ld(r.u2, e);

    const __m256d inv2a = _mm256_div_pd(one, _mm256_mul_pd(two, ar));
    __m256d gx = _mm256_mul_pd(_mm256_sub_pd(y1, y2), u0);
    gx = _mm256_add_pd(gx, _mm256_mul_pd(_mm256_sub_pd(y2, y0), u1));
    gx = _mm256_add_pd(gx, _mm256_mul_pd(_mm256_sub_pd(y0, y1), u2));
    gx = _mm256_mul_pd(gx, inv2a);
    __m256d gy = _mm256_mul_pd(_mm256_sub_pd(x2, x1), u0);
    gy = _mm256_add_pd(gy, _mm256_mul_pd(_mm256_sub_pd(x0, x2), u1));
    gy = _mm256_add_pd(gy, _mm256_mul_pd(_mm256_sub_pd(x1, x0), u2));
    gy = _mm256_mul_pd(gy, inv2a);

    const __m256d a11 = ld(b.a11, e), a12 = ld(b.a12, e), a22 = ld(b.a22, e);
    const __m256d hx = _mm256_add_pd(_mm256_mul_pd(a11, gx), _mm256_mul_pd(a12, gy));
    const __m256d hy = _mm256_add_pd(_mm256_mul_pd(a12, gx), _mm256_mul_pd(a22, gy));
    const __m256d i11 = ld(b.i11, e), i12 = ld(b.i12, e), i22 = ld(b.i22, e);
    const __m256d q0 = ld(r.q[0], e), q1 = ld(r.q[1], e), q2 = ld(r.q[2], e), q3 = ld(r.q[3], e);
    const __m256d q4 = ld(r.q[4], e), q5 = ld(r.q[5], e), q6 = ld(r.q[6], e), q7 = ld(r.q[7], e);
    const __m256d su = ld(r.su, e);

    __m256d racc = _mm256_setzero_pd();
    __m256d sacc = _mm256_setzero_pd();
    for (int p = 0; p < quad::kTri4N; ++p) {
      const __m256d b0 = _mm256_set1_pd(quad::kTri4B[p][0]);
      const __m256d b1 = _mm256_set1_pd(quad::kTri4B[p][1]);
      const __m256d b2 = _mm256_set1_pd(quad::kTri4B[p][2]);
      const __m256d w = _mm256_set1_pd(quad::kTri4W[p]);
      __m256d px = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(b0, x0), _mm256_mul_pd(b1, x1)),
                                 _mm256_mul_pd(b2, x2));
      __m256d py = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(b0, y0), _mm256_mul_pd(b1, y1)),
                                 _mm256_mul_pd(b2, y2));
      __m256d up = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(b0, u0), _mm256_mul_pd(b1, u1)),
                                 _mm256_mul_pd(b2, u2));
      const __m256d xi = _mm256_mul_pd(_mm256_sub_pd(px, cx), isc);
      const __m256d eta = _mm256_mul_pd(_mm256_sub_pd(py, cy), isc);
      __m256d qx = _mm256_add_pd(q0, _mm256_mul_pd(q1, xi));
      qx = _mm256_add_pd(qx, _mm256_mul_pd(q2, eta));
      qx = _mm256_add_pd(qx, _mm256_mul_pd(q6, _mm256_mul_pd(xi, xi)));
      qx = _mm256_add_pd(qx, _mm256_mul_pd(q7, _mm256_mul_pd(xi, eta)));
      __m256d qy = _mm256_add_pd(q3, _mm256_mul_pd(q4, xi));
      qy = _mm256_add_pd(qy, _mm256_mul_pd(q5, eta));
      qy = _mm256_add_pd(qy, _mm256_mul_pd(q6, _mm256_mul_pd(xi, eta)));
      qy = _mm256_add_pd(qy, _mm256_mul_pd(q7, _mm256_mul_pd(eta, eta)));
      const __m256d inner = _mm256_add_pd(_mm256_mul_pd(q6, xi), _mm256_mul_pd(q7, eta));
      const __m256d dq =
          _mm256_mul_pd(_mm256_add_pd(_mm256_add_pd(q1, q5), _mm256_mul_pd(three, inner)), isc);
      const __m256d rx = _mm256_sub_pd(hx, qx);
      const __m256d ry = _mm256_sub_pd(hy, qy);
      const __m256d t1 =
          _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(i11, rx), _mm256_mul_pd(i12, ry)), rx);
      const __m256d t2 =
          _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(i12, rx), _mm256_mul_pd(i22, ry)), ry);
      racc = _mm256_add_pd(racc, _mm256_mul_pd(w, _mm256_add_pd(t1, t2)));
      const __m256d s = _mm256_add_pd(_mm256_mul_pd(su, up), _mm256_mul_pd(vsdiv, dq));
      sacc = _mm256_add_pd(sacc, _mm256_mul_pd(w, _mm256_mul_pd(s, s)));
    }
    _mm256_storeu_pd(r2 + e, _mm256_mul_pd(ar, racc));
    _mm256_storeu_pd(s2 + e, _mm256_mul_pd(ar, sacc));
  }
  if (e < end) residual_terms_scalar(b, r, e, end, r2, s2);
}

__attribute__((target("avx2")))
void p1_stiffness_avx2(const ElementBatch& b, int begin, int end,
                       double* s00, double* s01, double* s02,
                       double* s11, double* s12, double* s22) {
  const int vend = begin + ((end - begin) / 4) * 4;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d four = _mm256_set1_pd(4.0);
  int e = begin;
  for (; e < vend; e += 4) {
    const __m256d x0 = ld(b.x0, e), y0 = ld(b.y0, e);
    const __m256d x1 = ld(b.x1, e), y1 = ld(b.y1, e);
    const __m256d x2 = ld(b.x2, e), y2 = ld(b.y2, e);
    const __m256d a11 = ld(b.a11, e), a12 = ld(b.a12, e), a22 = ld(b.a22, e);
    const __m256d g0x = _mm256_sub_pd(y1, y2), g0y = _mm256_sub_pd(x2, x1);
    const __m256d g1x = _mm256_sub_pd(y2, y0), g1y = _mm256_sub_pd(x0, x2);
    const __m256d g2x = _mm256_sub_pd(y0, y1), g2y = _mm256_sub_pd(x1, x0);
    const __m256d t0x = _mm256_add_pd(_mm256_mul_pd(a11, g0x), _mm256_mul_pd(a12, g0y));
    const __m256d t0y = _mm256_add_pd(_mm256_mul_pd(a12, g0x), _mm256_mul_pd(a22, g0y));
    const __m256d t1x = _mm256_add_pd(_mm256_mul_pd(a11, g1x), _mm256_mul_pd(a12, g1y));
    const __m256d t1y = _mm256_add_pd(_mm256_mul_pd(a12, g1x), _mm256_mul_pd(a22, g1y));
    const __m256d t2x = _mm256_add_pd(_mm256_mul_pd(a11, g2x), _mm256_mul_pd(a12, g2y));
    const __m256d t2y = _mm256_add_pd(_mm256_mul_pd(a12, g2x), _mm256_mul_pd(a22, g2y));
    const __m256d inv4a = _mm256_div_pd(one, _mm256_mul_pd(four, ld(b.area, e)));
    _mm256_storeu_pd(s00 + e, _mm256_mul_pd(
        _mm256_add_pd(_mm256_mul_pd(g0x, t0x), _mm256_mul_pd(g0y, t0y)), inv4a));
    _mm256_storeu_pd(s01 + e, _mm256_mul_pd(
        _mm256_add_pd(_mm256_mul_pd(g0x, t1x), _mm256_mul_pd(g0y, t1y)), inv4a));
    _mm256_storeu_pd(s02 + e, _mm256_mul_pd(
        _mm256_add_pd(_mm256_mul_pd(g0x, t2x), _mm256_mul_pd(g0y, t2y)), inv4a));
    _mm256_storeu_pd(s11 + e, _mm256_mul_pd(
        _mm256_add_pd(_mm256_mul_pd(g1x, t1x), _mm256_mul_pd(g1y, t1y)), inv4a));
    _mm256_storeu_pd(s12 + e, _mm256_mul_pd(
        _mm256_add_pd(_mm256_mul_pd(g1x, t2x), _mm256_mul_pd(g1y, t2y)), inv4a));
    _mm256_storeu_pd(s22 + e, _mm256_mul_pd(
        _mm256_add_pd(_mm256_mul_pd(g2x, t2x), _mm256_mul_pd(g2y, t2y)), inv4a));
  }
  if (e < end)
    p1_stiffness_scalar(b, e, end, s00, s01, s02, s11, s12, s22);
}

}  // namespace eigenbound::kernels::detail

#endif  // __x86_64__
