#include "eigenbound/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "eigenbound/errors.hpp"

namespace eigenbound {

namespace {

constexpr double kRitzTol = 1e-11;      // Lanczos estimate threshold
constexpr double kResidualTol = 1e-10;  // explicit pencil residual, relative
constexpr int kMaxApplications = 10000;

struct Pass {
  bool found = false;
  double mu = 0.0;      // eigenvalue of the shift-inverted operator
  double lambda = 0.0;  // Rayleigh quotient of y in the original pencil
  Eigen::VectorXd y;    // M-normalized
  double residual = 0.0;
};

// M-inner-product Lanczos for the largest eigenvalue of inv(K') M, i.e. the
// smallest eigenvalue of K y = lambda M y above the deflated directions.
class LanczosDriver {
 public:
  LanczosDriver(const Eigen::SparseMatrix<double>& K, const Eigen::SparseMatrix<double>& Kp,
                const Eigen::SparseMatrix<double>& M)
      : K_(K), M_(M), llt_(Kp) {
    if (llt_.info() != Eigen::Success)
      throw MatrixError("eigensolve: stiffness matrix is not positive definite");
  }

  int applications() const { return applications_; }

  // ortho: M-orthonormal directions to deflate (already-found eigenvectors
  // and/or the known kernel vector). mu_floor: below it the operator has no
  // further finite eigenvalue worth reporting.
  Pass run(const std::vector<Eigen::VectorXd>& ortho, double mu_floor, unsigned seed) {
    const int n = static_cast<int>(K_.rows());
    const int max_dim = std::max(1, n - static_cast<int>(ortho.size()));

    Eigen::VectorXd v = random_vector(n, seed);
    project(ortho, v);
    double vnorm = m_norm(v);
    for (int retry = 1; retry <= 4 && !(vnorm > 0.0); ++retry) {
      // start vector happened to be M-degenerate; try another
      v = random_vector(n, seed + 977u * retry);
      project(ortho, v);
      vnorm = m_norm(v);
    }
    if (!(vnorm > 0.0)) return {};  // nothing left outside the deflated span
    v /= vnorm;

    std::vector<Eigen::VectorXd> basis{v};
    std::vector<double> alpha, beta;
    Pass best{};

    while (true) {
      if (applications_ >= kMaxApplications)
        throw ConvergenceError("eigensolve: operator application budget exhausted");
      const Eigen::VectorXd& vj = basis.back();
      Eigen::VectorXd w = llt_.solve(M_ * vj);
      ++applications_;
      project(ortho, w);
      const double a = m_dot(vj, w);
      alpha.push_back(a);
      w -= a * vj;
      if (basis.size() >= 2) w -= beta.back() * basis[basis.size() - 2];
      reorthogonalize(basis, w);
      reorthogonalize(basis, w);  // twice is enough
      project(ortho, w);
      const double b = m_norm(w);

      // Ritz data of the tridiagonal section.
      const int j = static_cast<int>(alpha.size());
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j, j);
      for (int i = 0; i < j; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < j) {
          T(i, i + 1) = beta[i];
          T(i + 1, i) = beta[i];
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T);
      const int top = j - 1;  // ascending order; largest Ritz value last
      const double theta = tes.eigenvalues()(top);
      const double slast = tes.eigenvectors()(j - 1, top);
      const double estimate = std::abs(b * slast);

      const bool exhausted = !(b > 1e-14 * std::abs(theta) + 1e-300) ||
                             j >= max_dim;
      if (theta > mu_floor &&
          (estimate <= kRitzTol * std::abs(theta) || exhausted)) {
        Pass cand = extract(ortho, basis, tes.eigenvectors().col(top), theta);
        if (cand.found && (cand.residual <= kResidualTol || exhausted)) return cand;
        if (cand.found) best = cand;  // keep the best so far, keep iterating
      } else if (exhausted) {
        return best;  // spectrum exhausted below the floor
      }

      if (exhausted) {
        // Ritz estimate converged but the explicit residual is not there
        // yet and the space cannot grow; return the best we have.
        return best.found ? best : Pass{};
      }
      beta.push_back(b);
      basis.push_back(w / b);
    }
  }

 private:
  static Eigen::VectorXd random_vector(int n, unsigned seed) {
    std::mt19937_64 rng(0x5eed0000ULL + seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
  }

  double m_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(M_ * b);
  }
  double m_norm(const Eigen::VectorXd& a) const {
    const double s = m_dot(a, a);
    return s > 0.0 ? std::sqrt(s) : 0.0;
  }

  void project(const std::vector<Eigen::VectorXd>& ortho, Eigen::VectorXd& w) const {
    for (const Eigen::VectorXd& d : ortho) w -= m_dot(d, w) * d;
  }
  void reorthogonalize(const std::vector<Eigen::VectorXd>& basis, Eigen::VectorXd& w) const {
    for (const Eigen::VectorXd& v : basis) w -= m_dot(v, w) * v;
  }

  Pass extract(const std::vector<Eigen::VectorXd>& ortho,
               const std::vector<Eigen::VectorXd>& basis, const Eigen::VectorXd& coeffs,
               double theta) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(K_.rows());
    for (std::size_t i = 0; i < basis.size(); ++i) y += coeffs[static_cast<int>(i)] * basis[i];
    // The recurrence runs in the M seminorm, so when M is only semidefinite
    // the start vector's kernel-of-M component rides along unseen and would
    // inflate the pencil Rayleigh quotient. One application of the inverted
    // operator annihilates it (M is PSD: zero seminorm means M y = 0) and
    // sharpens the Ritz vector; re-project to keep the deflation exact.
    y = llt_.solve(M_ * y);
    project(ortho, y);
    const double ynorm = std::sqrt(y.dot(M_ * y));
    if (!(ynorm > 0.0)) return {};
    y /= ynorm;
    const Eigen::VectorXd Ky = K_ * y;
    const Eigen::VectorXd My = M_ * y;
    const double lambda = y.dot(Ky) / y.dot(My);
    Pass p;
    p.found = true;
    p.mu = theta;
    p.lambda = lambda;
    p.y = std::move(y);
    p.residual = (Ky - lambda * My).norm() / Ky.norm();
    return p;
  }

  const Eigen::SparseMatrix<double>& K_;
  const Eigen::SparseMatrix<double>& M_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt_;
  int applications_ = 0;
};

void fix_sign(Eigen::VectorXd& v) {
  int arg = 0;
  double mx = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mx) {
      mx = a;
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

}  // namespace

EigenApprox smallest_eigenpairs(const SparseSymMatrix& K, const SparseSymMatrix& M, int count,
                                const Eigen::VectorXd* deflate_constant) {
  const int n = K.dim();
  if (M.dim() != n) throw ArgumentError("eigensolve: pencil dimensions disagree");
  if (count < 1 || count > 2) throw ArgumentError("eigensolve: count must be 1 or 2");
  if (!(M.trace() > 0.0)) throw MatrixError("eigensolve: target matrix has no mass");

  const Eigen::SparseMatrix<double>& Km = K.matrix();
  const Eigen::SparseMatrix<double>& Mm = M.matrix();

  double shift = 0.0;
  std::vector<Eigen::VectorXd> ortho;
  if (deflate_constant != nullptr) {
    if (deflate_constant->size() != n)
      throw ArgumentError("eigensolve: deflation vector size mismatch");
    shift = 1e-8 * K.trace() / static_cast<double>(n);
    Eigen::VectorXd d = *deflate_constant;
    const double dn = std::sqrt(d.dot(Mm * d));
    if (!(dn > 0.0)) throw ArgumentError("eigensolve: deflation vector has zero target norm");
    ortho.push_back(d / dn);
  }
  Eigen::SparseMatrix<double> Kp = Km;
  if (shift != 0.0) Kp = Km + shift * Mm;

  LanczosDriver driver(Km, Kp, Mm);

  Pass first = driver.run(ortho, 0.0, 1u);
  if (!first.found) throw MatrixError("eigensolve: no eigenpair found (pencil degenerate)");
  if (!(first.lambda > 0.0))
    throw MatrixError("eigensolve: principal eigenvalue not positive (operator not coercive)");

  EigenApprox out;
  out.lambda1 = first.lambda;
  out.vector1 = first.y;
  fix_sign(out.vector1);
  // One more normalization pass so vector1' M vector1 = 1 to roundoff.
  out.vector1 /= std::sqrt(out.vector1.dot(Mm * out.vector1));
  out.normalization = std::sqrt(out.vector1.dot(Mm * out.vector1));
  out.residual1 = first.residual;

  if (count >= 2) {
    ortho.push_back(first.y);
    // Below this the remaining spectrum counts as +inf (semidefinite target
    // of low rank); measured relative to the first operator eigenvalue.
    const double floor = std::max(first.mu * 1e-12, 1e-300);
    Pass second = driver.run(ortho, floor, 2u);
    if (second.found) {
      out.lambda2 = second.lambda;
      if (out.lambda2 < out.lambda1) std::swap(out.lambda2, out.lambda1);
    }
  }
  return out;
}

std::vector<double> dense_oracle(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                 const Eigen::VectorXd* deflate_constant) {
  const int n = K.dim();
  if (M.dim() != n) throw ArgumentError("dense_oracle: pencil dimensions disagree");
  if (n > 2000) throw ArgumentError("dense_oracle: dimension " + std::to_string(n) +
                                    " exceeds the 2000 limit");
  Eigen::MatrixXd Kd(K.matrix());
  Eigen::MatrixXd Md(M.matrix());

  if (deflate_constant != nullptr) {
    if (deflate_constant->size() != n)
      throw ArgumentError("dense_oracle: deflation vector size mismatch");
    // Basis of the complement of span{M d}: columns 1..n-1 of the
    // Householder reflector mapping M d to a multiple of e_0.
    Eigen::VectorXd g = Md * (*deflate_constant);
    const double gn = g.norm();
    if (!(gn > 0.0)) throw ArgumentError("dense_oracle: deflation vector in the kernel of M");
    Eigen::VectorXd v = g;
    v[0] += (g[0] >= 0.0 ? gn : -gn);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) - (2.0 / v.squaredNorm()) * v * v.transpose();
    Eigen::MatrixXd Q = H.rightCols(n - 1);
    Kd = (Q.transpose() * Kd * Q).eval();
    Md = (Q.transpose() * Md * Q).eval();
  }

  const Eigen::LLT<Eigen::MatrixXd> mllt(Md);
  std::vector<double> out;
  if (mllt.info() == Eigen::Success) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kd, Md,
                                                                  Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) throw MatrixError("dense_oracle: eigen decomposition failed");
    out.assign(ges.eigenvalues().data(), ges.eigenvalues().data() + ges.eigenvalues().size());
  } else {
    // Semidefinite target: solve M y = mu K y with the SPD matrix on the
    // right, keep mu above a floor, reciprocate.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Md, Kd,
                                                                  Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) throw MatrixError("dense_oracle: eigen decomposition failed");
    const Eigen::VectorXd mu = ges.eigenvalues();
    const double mmax = mu.size() > 0 ? mu[mu.size() - 1] : 0.0;
    if (!(mmax > 0.0)) return out;
    const double floor = mmax * 1e-12;
    for (int i = static_cast<int>(mu.size()) - 1; i >= 0; --i)
      if (mu[i] > floor) out.push_back(1.0 / mu[i]);
    std::sort(out.begin(), out.end());
  }
  return out;
}

void write_eigenvalues_text(const std::vector<double>& values, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    os << buf;
  }
  if (!os) throw ArgumentError("write to '" + path + "' failed");
}

}  // namespace eigenbound
