#ifndef VPROJ_TESTS_SVD_ORACLE_HPP
#define VPROJ_TESTS_SVD_ORACLE_HPP

// One-sided Jacobi SVD used as an independent oracle for the pseudo-inverse
// and projector tests. Deliberately shares no code with the library's
// QR-based factorization path.

#include <cmath>
#include <vector>

#include "vproj/matrix.hpp"

namespace vproj::testing {

struct SvdResult {
  DenseMatrix u;              // m x n, orthonormal columns where sigma > 0
  std::vector<double> sigma;  // n singular values (unsorted)
  DenseMatrix v;              // n x n orthogonal
};

inline SvdResult jacobi_svd(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix w = a;
  DenseMatrix v = DenseMatrix::identity(n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          app += w(i, p) * w(i, p);
          aqq += w(i, q) * w(i, q);
          apq += w(i, p) * w(i, q);
        }
        if (std::abs(apq) <= 1e-30 + 1e-16 * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  SvdResult result;
  result.u = DenseMatrix(m, n, 0.0);
  result.sigma.assign(n, 0.0);
  result.v = v;
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += w(i, j) * w(i, j);
    norm = std::sqrt(norm);
    result.sigma[j] = norm;
    if (norm > 0.0)
      for (std::size_t i = 0; i < m; ++i) result.u(i, j) = w(i, j) / norm;
  }
  return result;
}

// Explicit pseudo-inverse V diag(1/sigma) U^T with small singular values
// dropped relative to the largest.
inline DenseMatrix svd_pinv(const DenseMatrix& a, double rank_tol = 1e-12) {
  const SvdResult svd = jacobi_svd(a);
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  double smax = 0.0;
  for (double s : svd.sigma) smax = std::max(smax, s);
  DenseMatrix pinv(n, m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (svd.sigma[j] <= rank_tol * smax) continue;
    const double inv = 1.0 / svd.sigma[j];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < m; ++i) pinv(r, i) += svd.v(r, j) * inv * svd.u(i, j);
  }
  return pinv;
}

// Explicit projector I - Phi Phi^+ built from the oracle decomposition.
inline DenseMatrix svd_projector_complement(const DenseMatrix& a, double rank_tol = 1e-12) {
  const SvdResult svd = jacobi_svd(a);
  double smax = 0.0;
  for (double s : svd.sigma) smax = std::max(smax, s);
  const std::size_t m = a.rows();
  DenseMatrix proj = DenseMatrix::identity(m);
  for (std::size_t j = 0; j < svd.sigma.size(); ++j) {
    if (svd.sigma[j] <= rank_tol * smax) continue;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) proj(i, k) -= svd.u(i, j) * svd.u(k, j);
  }
  return proj;
}

}  // namespace vproj::testing

#endif  // VPROJ_TESTS_SVD_ORACLE_HPP
