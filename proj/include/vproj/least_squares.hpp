#ifndef VPROJ_LEAST_SQUARES_HPP
#define VPROJ_LEAST_SQUARES_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "vproj/matrix.hpp"

namespace vproj {

// Rank-revealing factorization of an m-by-n matrix (m >= n) used to apply the
// Moore-Penrose pseudo-inverse without ever forming it. Built from a
// column-pivoted Householder QR; when the numerical rank r falls below n, a
// second QR of the leading r-by-n block's transpose supplies the minimum-norm
// solution (complete orthogonal decomposition).
struct LeastSquaresFactorization {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  double rank_tol = 0.0;

  // Packed pivoted QR: Householder vectors below the diagonal, R on and above.
  DenseMatrix qr;
  std::vector<double> tau;
  // perm[j] = source column now sitting at pivoted position j.
  std::vector<std::size_t> perm;

  // Secondary QR of B^T (n x r, B = leading r rows of R); empty when full rank.
  DenseMatrix qr2;
  std::vector<double> tau2;

  // Copy of the factorized matrix, used for residual/projector applications.
  DenseMatrix source;

  bool rank_deficient() const { return rank < cols; }
};

// Factorizes phi (m x n, m >= n). Diagonal entries of R whose magnitude falls
// below rank_tol times the largest one are treated as zero when determining
// the numerical rank. Rejects non-finite entries with the offending
// coordinate named in the exception.
LeastSquaresFactorization factorize_least_squares(const DenseMatrix& phi, double rank_tol = 1e-12);

// c = phi^+ y, the least-squares solution (minimum-norm when rank-deficient).
DenseVector apply_pseudo_inverse(const LeastSquaresFactorization& fac, const DenseVector& y);

// (phi^+)^T w for w of length n; result has length m.
DenseVector apply_pinv_transpose(const LeastSquaresFactorization& fac, const DenseVector& w);

// P_perp v = v - phi (phi^+ v), the orthogonal-complement projection.
DenseVector apply_projector_complement(const LeastSquaresFactorization& fac, const DenseVector& v);

// phi * x using the stored source matrix.
DenseVector apply_source(const LeastSquaresFactorization& fac, const DenseVector& x);

// Solves (H + mu I) d = -g by Cholesky. Returns nullopt when the shifted
// matrix is not positive definite or the solve is too inaccurate to trust, so
// the caller can raise mu.
std::optional<DenseVector> solve_regularized_normal(const DenseMatrix& h, const DenseVector& g,
                                                    double mu);

}  // namespace vproj

#endif  // VPROJ_LEAST_SQUARES_HPP
