#ifndef VPROJ_FINITE_DIFF_HPP
#define VPROJ_FINITE_DIFF_HPP

#include <functional>

#include "vproj/matrix.hpp"

namespace vproj {

// Default central-difference step: 1e-6 * max(1, ||a||_inf).
double finite_difference_step(const DenseVector& a);

// Central-difference Jacobian of a vector-valued map; column j is
// (f(a + h e_j) - f(a - h e_j)) / (2h). Non-finite evaluations are rejected
// with the coordinate index that produced them.
DenseMatrix finite_difference_jacobian(const std::function<DenseVector(const DenseVector&)>& f,
                                       const DenseVector& a, double h);

}  // namespace vproj

#endif  // VPROJ_FINITE_DIFF_HPP
