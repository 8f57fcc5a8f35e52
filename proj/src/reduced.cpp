#include "vproj/reduced.hpp"

#include <cmath>
#include <stdexcept>

#include "vproj/kernels.hpp"

namespace vproj {

const char* to_string(JacobianVariant variant) {
  switch (variant) {
    case JacobianVariant::GolubPereyra: return "gp";
    case JacobianVariant::Kaufman: return "kaufman";
    case JacobianVariant::Ruano: return "ruano";
  }
  return "?";
}

ReducedEvaluation evaluate_reduced(const SeparableModel& model, const Dataset& data,
                                   const DenseVector& a, double rank_tol) {
  if (a.size() != model.n_nonlinear)
    throw std::invalid_argument("evaluate_reduced: nonlinear parameter length mismatch");
  const DenseMatrix phi = model.basis(a, data);
  if (auto bad = first_nonfinite(phi))
    throw std::invalid_argument("evaluate_reduced: basis overflowed to a non-finite value at (" +
                                std::to_string(bad->first) + ", " + std::to_string(bad->second) +
                                "); nonlinear parameters out of range");

  ReducedEvaluation eval;
  eval.a = a;
  eval.factorization = factorize_least_squares(phi, rank_tol);
  eval.rank_deficient = eval.factorization.rank_deficient();

  const DenseVector y = model.target_vector(data);
  if (y.size() != phi.rows())
    throw std::invalid_argument("evaluate_reduced: target length does not match basis rows");
  eval.c = apply_pseudo_inverse(eval.factorization, y);
  eval.r2 = y - apply_source(eval.factorization, eval.c);
  eval.objective = 0.5 * norm2_squared(eval.r2);
  return eval;
}

std::optional<ReducedEvaluation> try_evaluate_reduced(const SeparableModel& model,
                                                      const Dataset& data, const DenseVector& a,
                                                      double rank_tol) {
  if (first_nonfinite(a)) return std::nullopt;
  const DenseMatrix phi = model.basis(a, data);
  if (first_nonfinite(phi)) return std::nullopt;

  ReducedEvaluation eval;
  eval.a = a;
  eval.factorization = factorize_least_squares(phi, rank_tol);
  eval.rank_deficient = eval.factorization.rank_deficient();
  const DenseVector y = model.target_vector(data);
  eval.c = apply_pseudo_inverse(eval.factorization, y);
  eval.r2 = y - apply_source(eval.factorization, eval.c);
  eval.objective = 0.5 * norm2_squared(eval.r2);
  if (!std::isfinite(eval.objective)) return std::nullopt;
  return eval;
}

DenseMatrix jacobian(const SeparableModel& model, const Dataset& data,
                     const ReducedEvaluation& eval, JacobianVariant variant) {
  const std::vector<DenseMatrix> deriv = model.basis_derivatives(eval.a, data);
  if (deriv.size() != model.n_nonlinear)
    throw std::invalid_argument("jacobian: derivative evaluator returned wrong count");
  const std::size_t m = eval.factorization.rows;
  const std::size_t k = model.n_nonlinear;
  for (const DenseMatrix& phik : deriv)
    if (phik.rows() != m || phik.cols() != model.n_linear)
      throw std::invalid_argument("jacobian: derivative matrix shape mismatch");
  DenseMatrix jac(m, k);

  const std::int64_t kk = std::int64_t(k);
#pragma omp parallel for schedule(dynamic) if (kk > 1 && m * k > 2048)
  for (std::int64_t col = 0; col < kk; ++col) {
    const DenseMatrix& phik = deriv[std::size_t(col)];
    // u = Phi_k c, shared by all three variants.
    const DenseVector u = serial::matvec(phik, eval.c);
    DenseVector column(m);
    switch (variant) {
      case JacobianVariant::Ruano:
        for (std::size_t i = 0; i < m; ++i) column[i] = -u[i];
        break;
      case JacobianVariant::Kaufman: {
        const DenseVector pu = apply_projector_complement(eval.factorization, u);
        for (std::size_t i = 0; i < m; ++i) column[i] = -pu[i];
        break;
      }
      case JacobianVariant::GolubPereyra: {
        const DenseVector pu = apply_projector_complement(eval.factorization, u);
        const DenseVector w = serial::matvec_transposed(phik, eval.r2);
        const DenseVector second = apply_pinv_transpose(eval.factorization, w);
        for (std::size_t i = 0; i < m; ++i) column[i] = -pu[i] - second[i];
        break;
      }
    }
    for (std::size_t i = 0; i < m; ++i) jac(i, std::size_t(col)) = column[i];
  }
  return jac;
}

DenseVector reduced_gradient(const ReducedEvaluation& eval, const DenseMatrix& jac) {
  if (jac.rows() != eval.r2.size())
    throw std::invalid_argument("reduced_gradient: Jacobian/residual shape mismatch");
  return matvec_transposed(jac, eval.r2);
}

}  // namespace vproj
