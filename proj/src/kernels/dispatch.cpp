#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "eigenbound/errors.hpp"
#include "kernels_detail.hpp"

namespace eigenbound::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Isa resolve_isa() {
  const char* env = std::getenv("EIGENBOUND_KERNELS");
  const std::string mode = env ? env : "auto";
  if (mode == "scalar") return Isa::Scalar;
  if (mode == "avx2") {
    if (!cpu_has_avx2()) throw ConfigError("EIGENBOUND_KERNELS=avx2 but the CPU has no AVX2");
    return Isa::Avx2;
  }
  if (mode == "auto" || mode.empty()) return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  throw ConfigError("EIGENBOUND_KERNELS must be scalar, avx2 or auto (got '" + mode + "')");
}

Isa& isa_slot() {
  static Isa isa = resolve_isa();
  return isa;
}

int resolve_threads() {
  const char* env = std::getenv("EIGENBOUND_THREADS");
  int want = 1;
  if (env && *env) {
    try {
      want = std::stoi(env);
    } catch (...) {
      throw ConfigError("EIGENBOUND_THREADS is not a number");
    }
  }
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (want < 1) want = 1;
  if (want > hw) want = hw;
  return want;
}

}  // namespace

Isa active_isa() { return isa_slot(); }

std::string isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !cpu_has_avx2()) throw ConfigError("AVX2 unavailable on this CPU");
  isa_slot() = isa;
}

int thread_count() {
  static int n = resolve_threads();
  return n;
}

namespace detail {

void parallel_ranges(int n, const std::function<void(int, int)>& fn) {
  const int threads = thread_count();
  if (threads <= 1 || n < 4096) {
    fn(0, n);
    return;
  }
  const int chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace detail

ElementBatch build_geometry_batch(const Mesh& mesh) {
  ElementBatch b;
  b.n = mesh.num_triangles();
  const std::size_t n = static_cast<std::size_t>(b.n);
  b.x0.resize(n); b.y0.resize(n);
  b.x1.resize(n); b.y1.resize(n);
  b.x2.resize(n); b.y2.resize(n);
  b.area.resize(n); b.cx.resize(n); b.cy.resize(n); b.inv_scale.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    const Triangle& t = mesh.triangles[e];
    const Vec2& p0 = mesh.vertices[t.v[0]];
    const Vec2& p1 = mesh.vertices[t.v[1]];
    const Vec2& p2 = mesh.vertices[t.v[2]];
    b.x0[e] = p0.x; b.y0[e] = p0.y;
    b.x1[e] = p1.x; b.y1[e] = p1.y;
    b.x2[e] = p2.x; b.y2[e] = p2.y;
    const double a2 = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
    if (!(a2 > 0.0)) throw ArgumentError("element batch: triangle " + std::to_string(e) +
                                         " is not positively oriented");
    b.area[e] = 0.5 * a2;
    b.cx[e] = (p0.x + p1.x + p2.x) / 3.0;
    b.cy[e] = (p0.y + p1.y + p2.y) / 3.0;
    b.inv_scale[e] = 1.0 / std::sqrt(b.area[e]);
  }
  return b;
}

void attach_coefficients(ElementBatch& b, const Mesh& mesh, const Coefficients& coeffs) {
  if (b.n != mesh.num_triangles())
    throw ArgumentError("attach_coefficients: batch does not match mesh");
  const std::size_t n = static_cast<std::size_t>(b.n);
  b.a11.resize(n); b.a12.resize(n); b.a22.resize(n);
  b.i11.resize(n); b.i12.resize(n); b.i22.resize(n);
  b.react.resize(n);
  const std::size_t nreg = coeffs.diffusion.size();
  std::vector<std::array<double, 7>> per_region(nreg);
  for (std::size_t r = 0; r < nreg; ++r) {
    const Eigen::Matrix2d& a = coeffs.diffusion[r];
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (!(a(0, 0) > 0.0) || !(det > 0.0) || a(0, 1) != a(1, 0))
      throw CoefficientError("diffusion matrix of region " + std::to_string(r) + " is not SPD");
    per_region[r] = {a(0, 0), a(0, 1), a(1, 1),
                     a(1, 1) / det, -a(0, 1) / det, a(0, 0) / det,
                     coeffs.reaction.empty() ? 0.0 : coeffs.reaction[r]};
  }
  for (std::size_t e = 0; e < n; ++e) {
    const int reg = mesh.triangles[e].region;
    if (reg < 0 || static_cast<std::size_t>(reg) >= nreg)
      throw CoefficientError("triangle region id " + std::to_string(reg) + " has no coefficient entry");
    const auto& pr = per_region[reg];
    b.a11[e] = pr[0]; b.a12[e] = pr[1]; b.a22[e] = pr[2];
    b.i11[e] = pr[3]; b.i12[e] = pr[4]; b.i22[e] = pr[5];
    b.react[e] = pr[6];
  }
}

namespace {

template <typename ScalarFn, typename Avx2Fn>
void dispatch(int n, ScalarFn&& scalar_fn, Avx2Fn&& avx2_fn) {
  if (n <= 0) return;
#if defined(__x86_64__)
  if (active_isa() == Isa::Avx2) {
    detail::parallel_ranges(n, avx2_fn);
    return;
  }
#else
  (void)avx2_fn;
#endif
  detail::parallel_ranges(n, scalar_fn);
}

}  // namespace

void residual_terms(const ElementBatch& batch, const ResidualBatch& rhs, double* r2, double* s2) {
  const std::size_t n = static_cast<std::size_t>(batch.n);
  if (rhs.u0.size() != n || rhs.su.size() != n || rhs.q[0].size() != n ||
      batch.i11.size() != n)
    throw ArgumentError("residual_terms: batch field sizes disagree");
  dispatch(batch.n,
           [&](int lo, int hi) { detail::residual_terms_scalar(batch, rhs, lo, hi, r2, s2); },
#if defined(__x86_64__)
           [&](int lo, int hi) { detail::residual_terms_avx2(batch, rhs, lo, hi, r2, s2); }
#else
           [](int, int) {}
#endif
  );
}

void p1_stiffness(const ElementBatch& batch, double* s00, double* s01, double* s02,
                  double* s11, double* s12, double* s22) {
  if (batch.a11.size() != static_cast<std::size_t>(batch.n))
    throw ArgumentError("p1_stiffness: coefficients not attached");
  dispatch(batch.n,
           [&](int lo, int hi) {
             detail::p1_stiffness_scalar(batch, lo, hi, s00, s01, s02, s11, s12, s22);
           },
#if defined(__x86_64__)
           [&](int lo, int hi) {
             detail::p1_stiffness_avx2(batch, lo, hi, s00, s01, s02, s11, s12, s22);
           }
#else
           [](int, int) {}
#endif
  );
}

}  // namespace eigenbound::kernels
