#include "vproj/kernels.hpp"

#include <cstdint>
#include <stdexcept>

namespace vproj {

namespace {
// Flop threshold below which the OpenMP fork overhead is not worth paying.
constexpr std::int64_t kParallelCutoff = 64 * 1024;

void check_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
}

void check_matvec(const DenseMatrix& a, const DenseVector& x, bool transposed) {
  const std::size_t need = transposed ? a.rows() : a.cols();
  if (x.size() != need) throw std::invalid_argument("matvec: dimension mismatch");
}
}  // namespace

namespace serial {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_matmul(a, b);
  DenseMatrix c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix gram(const DenseMatrix& a) {
  DenseMatrix g(a.cols(), a.cols(), 0.0);
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = i; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
  check_matvec(a, x, false);
  DenseVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseVector matvec_transposed(const DenseMatrix& a, const DenseVector& x) {
  check_matvec(a, x, true);
  DenseVector y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * x[i];
    y[j] = s;
  }
  return y;
}

}  // namespace serial

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_matmul(a, b);
  const std::int64_t work = std::int64_t(a.rows()) * a.cols() * b.cols();
  if (work < kParallelCutoff) return serial::matmul(a, b);
  DenseMatrix c(a.rows(), b.cols(), 0.0);
  const std::int64_t m = std::int64_t(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    const double* arow = a.row(std::size_t(i));
    double* crow = c.row(std::size_t(i));
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix gram(const DenseMatrix& a) {
  const std::int64_t work = std::int64_t(a.cols()) * a.cols() * a.rows();
  if (work < kParallelCutoff) return serial::gram(a);
  DenseMatrix g(a.cols(), a.cols(), 0.0);
  const std::int64_t n = std::int64_t(a.cols());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::size_t j = std::size_t(i); j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, std::size_t(i)) * a(k, j);
      g(std::size_t(i), j) = s;
      g(j, std::size_t(i)) = s;
    }
  }
  return g;
}

DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
  check_matvec(a, x, false);
  const std::int64_t work = std::int64_t(a.rows()) * a.cols();
  if (work < kParallelCutoff) return serial::matvec(a, x);
  DenseVector y(a.rows());
  const std::int64_t m = std::int64_t(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    const double* arow = a.row(std::size_t(i));
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
    y[std::size_t(i)] = s;
  }
  return y;
}

DenseVector matvec_transposed(const DenseMatrix& a, const DenseVector& x) {
  check_matvec(a, x, true);
  const std::int64_t work = std::int64_t(a.rows()) * a.cols();
  if (work < kParallelCutoff) return serial::matvec_transposed(a, x);
  DenseVector y(a.cols());
  const std::int64_t n = std::int64_t(a.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, std::size_t(j)) * x[i];
    y[std::size_t(j)] = s;
  }
  return y;
}

}  // namespace vproj
