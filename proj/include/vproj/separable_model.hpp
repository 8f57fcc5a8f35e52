#ifndef VPROJ_SEPARABLE_MODEL_HPP
#define VPROJ_SEPARABLE_MODEL_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vproj/dataset.hpp"
#include "vproj/matrix.hpp"

namespace vproj {

// A separable model y ~ Phi(a) c: the basis evaluator produces the m x
// n_linear basis matrix at nonlinear parameters a, and the derivative
// evaluator its n_nonlinear partial matrices dPhi/da_k (same shape each).
// Both are pure; evaluators may be called concurrently.
struct SeparableModel {
  std::string name;
  std::size_t n_linear = 0;
  std::size_t n_nonlinear = 0;

  std::function<DenseMatrix(const DenseVector& a, const Dataset& data)> basis;
  std::function<std::vector<DenseMatrix>(const DenseVector& a, const Dataset& data)>
      basis_derivatives;

  // Regression targets aligned with the basis rows (for autoregressive
  // models this is the usable suffix of the series, not the raw targets).
  std::function<DenseVector(const Dataset& data)> target_vector;

  // Feasible sampling box per nonlinear coordinate, used by verification
  // suites to draw random instances; optimizers themselves are unconstrained.
  DenseVector feasible_lower;
  DenseVector feasible_upper;
};

struct TrueParameters {
  DenseVector c_true;
  DenseVector a_true;
  double noise_sigma = 0.0;
};

// targets = Phi(a_true) c_true + sigma * eps with eps drawn from the seeded
// generator; sigma = 0 reproduces the noiseless model exactly.
Dataset generate_synthetic(const SeparableModel& model, const TrueParameters& truth,
                           const DenseMatrix& inputs, std::uint64_t seed);

}  // namespace vproj

#endif  // VPROJ_SEPARABLE_MODEL_HPP
