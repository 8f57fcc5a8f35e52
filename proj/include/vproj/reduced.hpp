#ifndef VPROJ_REDUCED_HPP
#define VPROJ_REDUCED_HPP

#include <optional>

#include "vproj/least_squares.hpp"
#include "vproj/separable_model.hpp"

namespace vproj {

enum class JacobianVariant { GolubPereyra, Kaufman, Ruano };

const char* to_string(JacobianVariant variant);

// One evaluation of the reduced problem at nonlinear parameters a: the
// eliminated linear solution c = Phi^+ y, the projected residual
// r2 = y - Phi c, the objective 0.5 ||r2||^2, and the factorization kept
// around for Jacobian assembly.
struct ReducedEvaluation {
  DenseVector a;
  DenseVector c;
  DenseVector r2;
  double objective = 0.0;
  LeastSquaresFactorization factorization;
  // Set when the factorization truncated the numerical rank (clustered
  // centers); iterations continue on the truncated basis.
  bool rank_deficient = false;
};

ReducedEvaluation evaluate_reduced(const SeparableModel& model, const Dataset& data,
                                   const DenseVector& a, double rank_tol = 1e-12);

// Non-throwing variant for line-search trial points: returns nullopt when the
// basis overflows to non-finite values instead of rejecting.
std::optional<ReducedEvaluation> try_evaluate_reduced(const SeparableModel& model,
                                                      const Dataset& data, const DenseVector& a,
                                                      double rank_tol = 1e-12);

// Jacobian of the reduced residual r2(a), m x n_nonlinear, with column k
// built from Phi_k = dPhi/da_k and the evaluation's factorization:
//   GolubPereyra: -P_perp Phi_k (Phi^+ y) - (Phi^+)^T Phi_k^T (P_perp y)
//   Kaufman:      -P_perp Phi_k (Phi^+ y)
//   Ruano:        -Phi_k (Phi^+ y)
DenseMatrix jacobian(const SeparableModel& model, const Dataset& data,
                     const ReducedEvaluation& eval, JacobianVariant variant);

// J^T r2, the gradient of the half-squared reduced objective.
DenseVector reduced_gradient(const ReducedEvaluation& eval, const DenseMatrix& jac);

}  // namespace vproj

#endif  // VPROJ_REDUCED_HPP
