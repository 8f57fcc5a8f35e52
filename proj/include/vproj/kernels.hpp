#ifndef VPROJ_KERNELS_HPP
#define VPROJ_KERNELS_HPP

#include "vproj/matrix.hpp"

namespace vproj {

// OpenMP-parallel dense kernels. Parallelism is only ever over independent
// output entries; every entry is accumulated in a fixed serial order, so the
// results are bit-identical to the serial reference implementations below for
// any thread count. Small problems fall back to the serial path.

// C = A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// G = A^T * A (symmetric)
DenseMatrix gram(const DenseMatrix& a);
// A * x
DenseVector matvec(const DenseMatrix& a, const DenseVector& x);
// A^T * x
DenseVector matvec_transposed(const DenseMatrix& a, const DenseVector& x);

namespace serial {

// Reference implementations kept for testing and benchmarking.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gram(const DenseMatrix& a);
DenseVector matvec(const DenseMatrix& a, const DenseVector& x);
DenseVector matvec_transposed(const DenseMatrix& a, const DenseVector& x);

}  // namespace serial

}  // namespace vproj

#endif  // VPROJ_KERNELS_HPP
