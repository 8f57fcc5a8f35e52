#ifndef VPROJ_OPTIMIZER_HPP
#define VPROJ_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vproj/reduced.hpp"

namespace vproj {

enum class OptimizerVariant { VP, VPLR, Joint, Alternating, BCD };
enum class Termination { ObjectiveDelta, StepNorm, Budget, LineSearchFailure };

const char* to_string(OptimizerVariant variant);
const char* to_string(Termination reason);

struct OptimizerConfig {
  OptimizerVariant variant = OptimizerVariant::VP;
  JacobianVariant jacobian = JacobianVariant::GolubPereyra;
  double epsilon = 1e-8;          // Step-5 tolerance on objective delta / step norm
  std::size_t max_iters = 200;    // iteration budget N
  double lm_damping_init = 1e-3;
  double lm_damping_growth = 4.0;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  std::size_t max_backtracks = 30;
  std::uint64_t seed = 0;
  double rank_tol = 1e-12;
  double correction_skip_tol = 1e-8;
  bool record_iterates = true;
};

void validate(const OptimizerConfig& cfg);

struct TraceRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double step_norm = 0.0;
  double damping = 0.0;
  double elapsed = 0.0;  // wall-clock seconds; excluded from determinism hashes
};

// Correction matrix T approximating the residual-weighted curvature term the
// Gauss-Newton Hessian drops; updated through the secant condition T s = g_hat.
struct CorrectionState {
  DenseMatrix T;
  std::size_t updates_applied = 0;
  std::size_t updates_skipped = 0;
};

// Rank-two secant update of the correction matrix:
//   T' = T - (T s s^T T) / (s^T T s) + (g_hat g_hat^T) / (g_hat^T s),
// which enforces T' s = g_hat exactly. Updates whose denominators fall under
// skip_tol-scaled guards are skipped; when T s vanishes at working precision
// (always true for the zero initial matrix) the subtraction term is dropped
// and the additive rank-one term alone carries the secant equation.
CorrectionState update_correction(const CorrectionState& state, const DenseVector& s,
                                  const DenseVector& g_hat, double skip_tol);

struct FitResult {
  DenseVector a_final;
  DenseVector c_final;
  std::vector<TraceRecord> trace;
  Termination termination = Termination::Budget;
  std::vector<DenseVector> iterates;  // nonlinear parameters per iteration (when recorded)
  double final_objective = 0.0;
  // VPLR diagnostics.
  std::size_t correction_updates_applied = 0;
  std::size_t correction_updates_skipped = 0;
  double max_secant_residual = 0.0;  // max ||T s - g_hat|| / (1 + ||g_hat||) over accepted updates
  double max_t_asymmetry = 0.0;      // max ||T - T^T||_F / (1 + ||T||_F)
};

struct LineSearchResult {
  bool success = false;
  double beta = 0.0;
  DenseVector a_new;
  double f_new = 0.0;
  std::size_t trials = 0;
};

// Armijo backtracking: largest beta in {1, rho, rho^2, ...} with
//   f(a + beta d) <= f0 + c1 * beta * g^T d,
// within max_backtracks trials. Requires g^T d < 0. Non-finite trial values
// are treated as rejections, so overflowing steps back off instead of failing.
LineSearchResult backtracking_search(const std::function<double(const DenseVector&)>& objective,
                                     const DenseVector& a, const DenseVector& d,
                                     const DenseVector& g, double f0, const OptimizerConfig& cfg);

// Convenience overload evaluating f0 = objective(a) itself.
LineSearchResult backtracking_search(const std::function<double(const DenseVector&)>& objective,
                                     const DenseVector& a, const DenseVector& d,
                                     const DenseVector& g, const OptimizerConfig& cfg);

// Gauss-Newton / Levenberg-Marquardt on the reduced problem.
FitResult run_vp(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                 const OptimizerConfig& cfg);

// VP with the recursively corrected Hessian (J^T J + T) d = -J^T r2 for
// large-residual problems.
FitResult run_vplr(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                   const OptimizerConfig& cfg);

// LM on the full residual over theta = (c, a).
FitResult run_joint(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                    const DenseVector& c0, const OptimizerConfig& cfg);

// Alternating minimization: exact linear solve, then one damped GN step on a.
FitResult run_alternating(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                          const OptimizerConfig& cfg);

// Block coordinate descent: Armijo gradient step per block.
FitResult run_bcd(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                  const OptimizerConfig& cfg);

// Dispatch on cfg.variant; Joint eliminates c at a0 for its warm start.
FitResult run_optimizer(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                        const OptimizerConfig& cfg);

}  // namespace vproj

#endif  // VPROJ_OPTIMIZER_HPP
