#include "vproj/least_squares.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vproj/kernels.hpp"

namespace vproj {

namespace {

constexpr std::size_t kQrParallelMinWork = 8 * 1024;

// Generates the Householder reflector H = I - tau v v^T (v[0] = 1) that maps
// the column segment a[k..m) of column j onto beta e_1. The vector tail is
// written back below the diagonal; returns beta.
double make_householder(DenseMatrix& a, std::size_t k, std::size_t j, double& tau) {
  const std::size_t m = a.rows();
  const double alpha = a(k, j);
  double ssq = 0.0;
  for (std::size_t i = k + 1; i < m; ++i) ssq += a(i, j) * a(i, j);
  const double xnorm = std::sqrt(alpha * alpha + ssq);
  if (xnorm == 0.0) {
    tau = 0.0;
    return 0.0;
  }
  const double beta = alpha >= 0.0 ? -xnorm : xnorm;
  tau = (beta - alpha) / beta;
  const double scale = 1.0 / (alpha - beta);
  for (std::size_t i = k + 1; i < m; ++i) a(i, j) *= scale;
  return beta;
}

// Applies the reflector stored in column k of `a` to column j (rows k..m).
void apply_householder_col(DenseMatrix& a, std::size_t k, double tau, std::size_t j) {
  if (tau == 0.0) return;
  const std::size_t m = a.rows();
  double s = a(k, j);
  for (std::size_t i = k + 1; i < m; ++i) s += a(i, k) * a(i, j);
  s *= tau;
  a(k, j) -= s;
  for (std::size_t i = k + 1; i < m; ++i) a(i, j) -= s * a(i, k);
}

// Applies the reflector stored in column k of `qr` to a vector (rows k..m).
void apply_householder_vec(const DenseMatrix& qr, std::size_t k, double tau, DenseVector& y) {
  if (tau == 0.0) return;
  const std::size_t m = qr.rows();
  double s = y[k];
  for (std::size_t i = k + 1; i < m; ++i) s += qr(i, k) * y[i];
  s *= tau;
  y[k] -= s;
  for (std::size_t i = k + 1; i < m; ++i) y[i] -= s * qr(i, k);
}

// y <- Q^T y, reflectors applied in ascending order.
void apply_qt(const DenseMatrix& qr, const std::vector<double>& tau, DenseVector& y) {
  for (std::size_t k = 0; k < tau.size(); ++k) apply_householder_vec(qr, k, tau[k], y);
}

// y <- Q y, reflectors applied in descending order.
void apply_q(const DenseMatrix& qr, const std::vector<double>& tau, DenseVector& y) {
  for (std::size_t k = tau.size(); k-- > 0;) apply_householder_vec(qr, k, tau[k], y);
}

// Unpivoted Householder QR used for the secondary factorization of B^T.
void householder_qr(DenseMatrix& a, std::vector<double>& tau) {
  const std::size_t n = a.cols();
  tau.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double beta = make_householder(a, k, k, tau[k]);
    a(k, k) = beta;
    for (std::size_t j = k + 1; j < n; ++j) apply_householder_col(a, k, tau[k], j);
  }
}

}  // namespace

LeastSquaresFactorization factorize_least_squares(const DenseMatrix& phi, double rank_tol) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  if (m < 1 || n < 1) throw std::invalid_argument("factorize_least_squares: empty matrix");
  if (m < n) throw std::invalid_argument("factorize_least_squares: need rows >= cols");
  if (!(rank_tol > 0.0)) throw std::invalid_argument("factorize_least_squares: rank_tol must be positive");
  require_finite(phi, "factorize_least_squares");

  LeastSquaresFactorization fac;
  fac.rows = m;
  fac.cols = n;
  fac.rank_tol = rank_tol;
  fac.qr = phi;
  fac.tau.assign(n, 0.0);
  fac.perm.resize(n);
  std::iota(fac.perm.begin(), fac.perm.end(), std::size_t{0});
  fac.source = phi;

  DenseMatrix& a = fac.qr;
  std::vector<double> colssq(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    // Exact trailing column norms each step; cheaper downdating schemes save
    // little at these sizes and drift for clustered columns.
    const std::int64_t ncols = std::int64_t(n - k);
#pragma omp parallel for schedule(static) if (std::size_t(ncols) * (m - k) > kQrParallelMinWork)
    for (std::int64_t jj = 0; jj < ncols; ++jj) {
      const std::size_t j = k + std::size_t(jj);
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += a(i, j) * a(i, j);
      colssq[j] = s;
    }
    std::size_t pivot = k;
    for (std::size_t j = k + 1; j < n; ++j)
      if (colssq[j] > colssq[pivot]) pivot = j;
    if (pivot != k) {
      for (std::size_t i = 0; i < m; ++i) std::swap(a(i, k), a(i, pivot));
      std::swap(fac.perm[k], fac.perm[pivot]);
    }

    const double beta = make_householder(a, k, k, fac.tau[k]);
    a(k, k) = beta;
    const std::int64_t trailing = std::int64_t(n - k - 1);
#pragma omp parallel for schedule(static) if (std::size_t(trailing) * (m - k) > kQrParallelMinWork)
    for (std::int64_t jj = 0; jj < trailing; ++jj)
      apply_householder_col(a, k, fac.tau[k], k + 1 + std::size_t(jj));
  }

  const double rmax = std::abs(a(0, 0));
  std::size_t r = 0;
  while (r < n && std::abs(a(r, r)) > rank_tol * rmax) ++r;
  fac.rank = r;

  if (r > 0 && r < n) {
    // Minimum-norm path: QR of B^T where B is the leading r x n block of R.
    fac.qr2 = DenseMatrix(n, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < n; ++j) fac.qr2(j, i) = j >= i ? a(i, j) : 0.0;
    householder_qr(fac.qr2, fac.tau2);
  }
  return fac;
}

DenseVector apply_pseudo_inverse(const LeastSquaresFactorization& fac, const DenseVector& y) {
  if (y.size() != fac.rows) throw std::invalid_argument("apply_pseudo_inverse: length mismatch");
  const std::size_t n = fac.cols;
  const std::size_t r = fac.rank;
  DenseVector u = y;
  apply_qt(fac.qr, fac.tau, u);

  DenseVector z(n, 0.0);
  if (r == 0) {
    // Zero matrix within tolerance; the minimum-norm solution is zero.
  } else if (r == n) {
    for (std::size_t i = n; i-- > 0;) {
      double s = u[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= fac.qr(i, j) * z[j];
      z[i] = s / fac.qr(i, i);
    }
  } else {
    // Solve R2^T w = u_1 (forward), then z = Q2 [w; 0]: the minimum-norm
    // solution of the underdetermined system B z = u_1.
    DenseVector w(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      double s = u[i];
      for (std::size_t j = 0; j < i; ++j) s -= fac.qr2(j, i) * w[j];
      w[i] = s / fac.qr2(i, i);
    }
    for (std::size_t i = 0; i < r; ++i) z[i] = w[i];
    apply_q(fac.qr2, fac.tau2, z);
  }

  DenseVector c(n);
  for (std::size_t j = 0; j < n; ++j) c[fac.perm[j]] = z[j];
  return c;
}

DenseVector apply_pinv_transpose(const LeastSquaresFactorization& fac, const DenseVector& w) {
  if (w.size() != fac.cols) throw std::invalid_argument("apply_pinv_transpose: length mismatch");
  const std::size_t n = fac.cols;
  const std::size_t r = fac.rank;
  DenseVector wp(n);
  for (std::size_t j = 0; j < n; ++j) wp[j] = w[fac.perm[j]];

  DenseVector u(fac.rows, 0.0);
  if (r == n) {
    // u_1 = R^{-T} wp (forward substitution).
    for (std::size_t i = 0; i < n; ++i) {
      double s = wp[i];
      for (std::size_t j = 0; j < i; ++j) s -= fac.qr(j, i) * u[j];
      u[i] = s / fac.qr(i, i);
    }
  } else if (r > 0) {
    // u_1 = R2^{-1} Q2^T wp.
    apply_qt(fac.qr2, fac.tau2, wp);
    DenseVector t(r, 0.0);
    for (std::size_t i = r; i-- > 0;) {
      double s = wp[i];
      for (std::size_t j = i + 1; j < r; ++j) s -= fac.qr2(i, j) * t[j];
      t[i] = s / fac.qr2(i, i);
    }
    for (std::size_t i = 0; i < r; ++i) u[i] = t[i];
  }
  apply_q(fac.qr, fac.tau, u);
  return u;
}

DenseVector apply_source(const LeastSquaresFactorization& fac, const DenseVector& x) {
  return matvec(fac.source, x);
}

DenseVector apply_projector_complement(const LeastSquaresFactorization& fac, const DenseVector& v) {
  if (v.size() != fac.rows) throw std::invalid_argument("apply_projector_complement: length mismatch");
  const DenseVector c = apply_pseudo_inverse(fac, v);
  const DenseVector pv = apply_source(fac, c);
  return v - pv;
}

std::optional<DenseVector> solve_regularized_normal(const DenseMatrix& h, const DenseVector& g,
                                                    double mu) {
  const std::size_t k = h.rows();
  if (h.cols() != k) throw std::invalid_argument("solve_regularized_normal: H must be square");
  if (g.size() != k) throw std::invalid_argument("solve_regularized_normal: length mismatch");
  if (mu < 0.0) throw std::invalid_argument("solve_regularized_normal: mu must be nonnegative");
  require_finite(h, "solve_regularized_normal");
  require_finite(g, "solve_regularized_normal");

  DenseMatrix l(k, k, 0.0);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) l(i, j) = h(i, j) + (i == j ? mu : 0.0);
    max_diag = std::max(max_diag, l(i, i));
  }

  // In-place Cholesky on the lower triangle. A non-positive pivot means the
  // shifted system is not PD; a pivot collapsing relative to the largest
  // diagonal means it is numerically singular and would produce absurdly
  // scaled directions. Either way the caller needs more damping.
  const double pivot_floor = 1e-13 * max_diag;
  for (std::size_t j = 0; j < k; ++j) {
    double diag = l(j, j);
    for (std::size_t p = 0; p < j; ++p) diag -= l(j, p) * l(j, p);
    if (!(diag > pivot_floor) || !std::isfinite(diag)) return std::nullopt;
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < k; ++i) {
      double s = l(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / ljj;
    }
  }

  DenseVector d(k);
  for (std::size_t i = 0; i < k; ++i) {
    double s = -g[i];
    for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * d[j];
    d[i] = s / l(i, i);
  }
  for (std::size_t i = k; i-- > 0;) {
    double s = d[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= l(j, i) * d[j];
    d[i] = s / l(i, i);
  }
  if (first_nonfinite(d)) return std::nullopt;

  // Residual guard: reject solves degraded by near-singularity.
  double res = 0.0, hd = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double s = mu * d[i] + g[i];
    for (std::size_t j = 0; j < k; ++j) s += h(i, j) * d[j];
    res += s * s;
    hd += d[i] * d[i];
  }
  const double scale = norm2(g) + (frobenius_norm(h) + mu) * std::sqrt(hd);
  if (std::sqrt(res) > 1e-8 * (scale > 0.0 ? scale : 1.0)) return std::nullopt;
  return d;
}

}  // namespace vproj
