#include "vproj/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vproj/kernels.hpp"

namespace vproj {

namespace {

constexpr double kDampingFloor = 1e-12;
constexpr double kDampingCeiling = 1e40;
constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

bool same_entries(const DenseVector& a, const DenseVector& b) {
  return a.storage() == b.storage();
}

void add_in_place(DenseMatrix& h, const DenseMatrix& t) {
  for (std::size_t i = 0; i < h.storage().size(); ++i) h.storage()[i] += t.storage()[i];
}

// Solves (H + mu I) d = -g, escalating mu by `growth` until the system is PD
// and d is a descent direction. mu = 0 is attempted as given; escalation
// starts from max(mu_start, floor).
std::optional<DenseVector> solve_with_escalation(const DenseMatrix& h, const DenseVector& g,
                                                 double mu_first, double mu_start, double growth,
                                                 double& mu_used) {
  double mu = mu_first;
  while (true) {
    auto d = solve_regularized_normal(h, g, mu);
    if (d && dot(*d, g) < 0.0) {
      mu_used = mu;
      return d;
    }
    mu = mu <= 0.0 ? std::max(mu_start, kDampingFloor) : mu * growth;
    if (mu > kDampingCeiling) return std::nullopt;
  }
}

// A step is treated as accepted only when the backtracking search succeeds
// without collapsing below this fraction of the full step; anything shorter
// signals a direction the damping must fix, not the step size.
constexpr double kBetaAcceptFloor = 1.0 / 16.0;

// Number of backtracking trials that stays at or above the acceptance floor.
std::size_t inner_trial_budget(const OptimizerConfig& cfg) {
  std::size_t trials = 1;
  double beta = 1.0;
  while (beta * cfg.backtrack_factor >= kBetaAcceptFloor && trials < cfg.max_backtracks) {
    beta *= cfg.backtrack_factor;
    ++trials;
  }
  return trials;
}

}  // namespace

const char* to_string(OptimizerVariant variant) {
  switch (variant) {
    case OptimizerVariant::VP: return "vp";
    case OptimizerVariant::VPLR: return "vplr";
    case OptimizerVariant::Joint: return "joint";
    case OptimizerVariant::Alternating: return "alternating";
    case OptimizerVariant::BCD: return "bcd";
  }
  return "?";
}

const char* to_string(Termination reason) {
  switch (reason) {
    case Termination::ObjectiveDelta: return "ObjectiveDelta";
    case Termination::StepNorm: return "StepNorm";
    case Termination::Budget: return "Budget";
    case Termination::LineSearchFailure: return "LineSearchFailure";
  }
  return "?";
}

void validate(const OptimizerConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("config: max_iters must be >= 1");
  if (!(cfg.armijo_c1 > 0.0 && cfg.armijo_c1 < 1.0))
    throw std::invalid_argument("config: armijo_c1 must lie in (0, 1)");
  if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0))
    throw std::invalid_argument("config: backtrack_factor must lie in (0, 1)");
  if (!(cfg.lm_damping_init >= 0.0)) throw std::invalid_argument("config: damping must be >= 0");
  if (!(cfg.lm_damping_growth > 1.0))
    throw std::invalid_argument("config: damping growth must be > 1");
}

LineSearchResult backtracking_search(const std::function<double(const DenseVector&)>& objective,
                                     const DenseVector& a, const DenseVector& d,
                                     const DenseVector& g, double f0,
                                     const OptimizerConfig& cfg) {
  const double slope = dot(g, d);
  if (!(slope < 0.0))
    throw std::invalid_argument("backtracking_search: d is not a descent direction");

  LineSearchResult result;
  double beta = 1.0;
  for (std::size_t trial = 0; trial < cfg.max_backtracks; ++trial) {
    const DenseVector candidate = add_scaled(a, beta, d);
    const double f_trial = objective(candidate);
    ++result.trials;
    if (std::isfinite(f_trial) && f_trial <= f0 + cfg.armijo_c1 * beta * slope) {
      result.success = true;
      result.beta = beta;
      result.a_new = candidate;
      result.f_new = f_trial;
      return result;
    }
    beta *= cfg.backtrack_factor;
  }
  return result;
}

LineSearchResult backtracking_search(const std::function<double(const DenseVector&)>& objective,
                                     const DenseVector& a, const DenseVector& d,
                                     const DenseVector& g, const OptimizerConfig& cfg) {
  return backtracking_search(objective, a, d, g, objective(a), cfg);
}

namespace {
// Pairs with a smaller cosine between g_hat and s carry no usable curvature:
// accepting them plants enormous rank-one terms that stall later iterations.
constexpr double kCurvatureCosineFloor = 1e-2;
// An add-only update leaves a secant residual of ||T s||; this bound keeps it
// an order below the certified 1e-8 (1 + ||g_hat||).
constexpr double kSecantDropTol = 1e-9;
}  // namespace

CorrectionState update_correction(const CorrectionState& state, const DenseVector& s,
                                  const DenseVector& g_hat, double skip_tol) {
  if (!(skip_tol > 0.0)) throw std::invalid_argument("update_correction: skip_tol must be positive");
  const std::size_t k = s.size();
  if (g_hat.size() != k) throw std::invalid_argument("update_correction: length mismatch");

  CorrectionState next = state;
  if (next.T.rows() == 0) next.T = DenseMatrix(k, k, 0.0);
  if (next.T.rows() != k || next.T.cols() != k)
    throw std::invalid_argument("update_correction: T dimension mismatch");

  const double gs = dot(g_hat, s);
  const double g_norm = norm2(g_hat);
  const double s_norm = norm2(s);
  if (!(gs > std::max(skip_tol, kCurvatureCosineFloor) * g_norm * s_norm)) {
    ++next.updates_skipped;
    return next;
  }

  const DenseVector ts = matvec(next.T, s);
  const double ts_norm = norm2(ts);
  // When T s vanishes at working precision (always true for the zero initial
  // matrix, and whenever s falls in the null space of the PSD correction) the
  // subtraction term is dropped; the rank-one addition alone then carries the
  // secant equation up to the ||T s|| residual.
  const bool drop_subtraction = ts_norm <= kSecantDropTol * (1.0 + g_norm);
  if (!drop_subtraction) {
    // Division guard on the subtraction term. For the PSD correction this
    // cosine form stays satisfiable as T gains rank; an absolute bound would
    // freeze a rank-deficient T permanently.
    const double sts = dot(s, ts);
    if (!(sts > skip_tol * ts_norm * s_norm)) {
      ++next.updates_skipped;
      return next;
    }
    const double inv_sts = 1.0 / sts;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) next.T(i, j) -= ts[i] * ts[j] * inv_sts;
  }
  const double inv_gs = 1.0 / gs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) next.T(i, j) += g_hat[i] * g_hat[j] * inv_gs;
  ++next.updates_applied;
  return next;
}

namespace {

// Shared VP / VPLR iteration; VPLR adds the correction term to the
// Gauss-Newton system and refreshes it through the secant update.
FitResult run_reduced_family(const SeparableModel& model, const Dataset& data,
                             const DenseVector& a0, const OptimizerConfig& cfg,
                             bool with_correction) {
  validate(cfg);
  Stopwatch watch;
  FitResult out;

  ReducedEvaluation eval = evaluate_reduced(model, data, a0, cfg.rank_tol);
  DenseMatrix jac = jacobian(model, data, eval, cfg.jacobian);
  DenseVector grad = reduced_gradient(eval, jac);

  CorrectionState corr;
  corr.T = DenseMatrix(model.n_nonlinear, model.n_nonlinear, 0.0);

  // Persistent damping. Plain VP runs a standard LM parameter; VPLR solves
  // the corrected system undamped when it can, carrying a fallback mu that
  // decays back to exactly zero after full steps.
  double mu = with_correction ? 0.0 : cfg.lm_damping_init;
  out.trace.push_back({0, eval.objective, norm2(grad), 0.0, mu, watch.seconds()});
  if (cfg.record_iterates) out.iterates.push_back(eval.a);
  out.termination = Termination::Budget;

  OptimizerConfig inner = cfg;
  inner.max_backtracks = inner_trial_budget(cfg);
  const double growth = with_correction ? 2.0 : cfg.lm_damping_growth;

  for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
    DenseMatrix h = gram(jac);
    if (with_correction) add_in_place(h, corr.T);

    // LM acceptance loop: a rejected or collapsed step raises mu and retries
    // without advancing the iteration; only accepted steps feed the stopping
    // tests.
    double mu_used = 0.0;
    double mu_try = with_correction ? mu : std::max(mu, kDampingFloor);
    std::optional<LineSearchResult> accepted;
    std::optional<ReducedEvaluation> cached;
    bool tiny_direction = false;
    double dir_norm = 0.0;
    while (true) {
      auto dir = solve_with_escalation(h, grad, mu_try, cfg.lm_damping_init, growth, mu_used);
      if (!dir) break;
      dir_norm = norm2(*dir);
      if (dir_norm < cfg.epsilon) {
        tiny_direction = true;
        break;
      }
      cached.reset();
      const auto objective = [&](const DenseVector& trial) -> double {
        auto e = try_evaluate_reduced(model, data, trial, cfg.rank_tol);
        if (!e) return kInf;
        const double f = e->objective;
        cached = std::move(e);
        return f;
      };
      LineSearchResult ls =
          backtracking_search(objective, eval.a, *dir, grad, eval.objective, inner);
      if (ls.success) {
        accepted = std::move(ls);
        break;
      }
      mu_try = std::max(mu_used, kDampingFloor) * growth;
      if (mu_try > kDampingCeiling) break;
    }

    if (tiny_direction) {
      out.trace.push_back({iter, eval.objective, norm2(grad), dir_norm, mu_used, watch.seconds()});
      if (cfg.record_iterates) out.iterates.push_back(eval.a);
      out.termination = Termination::StepNorm;
      break;
    }
    if (!accepted) {
      out.termination = Termination::LineSearchFailure;
      break;
    }
    const LineSearchResult& ls = *accepted;
    if (with_correction) {
      mu = ls.beta == 1.0 ? (mu_used / 2.0 < kDampingFloor ? 0.0 : mu_used / 2.0) : mu_used;
    } else {
      mu = ls.beta == 1.0 ? std::max(mu_used / 2.0, kDampingFloor) : mu_used;
    }

    ReducedEvaluation eval_new = (cached && same_entries(cached->a, ls.a_new))
                                     ? std::move(*cached)
                                     : evaluate_reduced(model, data, ls.a_new, cfg.rank_tol);
    const DenseVector step = eval_new.a - eval.a;
    const double step_norm = norm2(step);

    DenseMatrix jac_new = jacobian(model, data, eval_new, cfg.jacobian);
    DenseVector grad_new = reduced_gradient(eval_new, jac_new);

    if (with_correction) {
      // g_hat = (J^{k+1})^T r2^{k+1} - (J^k)^T r2^{k+1}, both at the new residual.
      const DenseVector g_hat = grad_new - matvec_transposed(jac, eval_new.r2);
      CorrectionState next = update_correction(corr, step, g_hat, cfg.correction_skip_tol);
      if (next.updates_applied > corr.updates_applied) {
        const DenseVector secant = matvec(next.T, step) - g_hat;
        out.max_secant_residual = std::max(out.max_secant_residual,
                                           norm2(secant) / (1.0 + norm2(g_hat)));
      }
      double asym = 0.0;
      for (std::size_t i = 0; i < next.T.rows(); ++i)
        for (std::size_t j = i + 1; j < next.T.cols(); ++j) {
          const double diff = next.T(i, j) - next.T(j, i);
          asym += 2.0 * diff * diff;
        }
      out.max_t_asymmetry = std::max(
          out.max_t_asymmetry, std::sqrt(asym) / (1.0 + frobenius_norm(next.T)));
      corr = std::move(next);
    }

    const double f_delta = std::abs(eval_new.objective - eval.objective);
    out.trace.push_back({iter, eval_new.objective, norm2(grad_new), step_norm, mu_used,
                         watch.seconds()});
    eval = std::move(eval_new);
    jac = std::move(jac_new);
    grad = std::move(grad_new);
    if (cfg.record_iterates) out.iterates.push_back(eval.a);

    if (step_norm < cfg.epsilon) {
      out.termination = Termination::StepNorm;
      break;
    }
    if (f_delta < cfg.epsilon) {
      out.termination = Termination::ObjectiveDelta;
      break;
    }
  }

  out.a_final = eval.a;
  out.c_final = eval.c;
  out.final_objective = eval.objective;
  out.correction_updates_applied = corr.updates_applied;
  out.correction_updates_skipped = corr.updates_skipped;
  return out;
}

}  // namespace

FitResult run_vp(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                 const OptimizerConfig& cfg) {
  if (cfg.variant != OptimizerVariant::VP)
    throw std::invalid_argument("run_vp: config variant mismatch");
  return run_reduced_family(model, data, a0, cfg, false);
}

FitResult run_vplr(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                   const OptimizerConfig& cfg) {
  if (cfg.variant != OptimizerVariant::VPLR)
    throw std::invalid_argument("run_vplr: config variant mismatch");
  return run_reduced_family(model, data, a0, cfg, true);
}

FitResult run_joint(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                    const DenseVector& c0, const OptimizerConfig& cfg) {
  if (cfg.variant != OptimizerVariant::Joint)
    throw std::invalid_argument("run_joint: config variant mismatch");
  validate(cfg);
  if (a0.size() != model.n_nonlinear || c0.size() != model.n_linear)
    throw std::invalid_argument("run_joint: initial parameter length mismatch");
  Stopwatch watch;
  FitResult out;

  const DenseVector y = model.target_vector(data);
  const std::size_t n = model.n_linear;
  const std::size_t k = model.n_nonlinear;

  struct JointPoint {
    DenseVector theta;
    DenseMatrix phi;
    DenseVector rho;
    double f = kInf;
  };
  const auto split_a = [&](const DenseVector& theta) {
    DenseVector a(k);
    for (std::size_t t = 0; t < k; ++t) a[t] = theta[n + t];
    return a;
  };
  const auto split_c = [&](const DenseVector& theta) {
    DenseVector c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = theta[j];
    return c;
  };
  const auto evaluate = [&](const DenseVector& theta) -> std::optional<JointPoint> {
    if (first_nonfinite(theta)) return std::nullopt;
    JointPoint pt;
    pt.theta = theta;
    pt.phi = model.basis(split_a(theta), data);
    if (first_nonfinite(pt.phi)) return std::nullopt;
    pt.rho = y - matvec(pt.phi, split_c(theta));
    pt.f = 0.5 * norm2_squared(pt.rho);
    if (!std::isfinite(pt.f)) return std::nullopt;
    return pt;
  };

  DenseVector theta0(n + k);
  for (std::size_t j = 0; j < n; ++j) theta0[j] = c0[j];
  for (std::size_t t = 0; t < k; ++t) theta0[n + t] = a0[t];
  auto current = evaluate(theta0);
  if (!current) throw std::invalid_argument("run_joint: initial point evaluates non-finite");

  // Full residual Jacobian [-Phi | -Phi_t c] over theta = (c, a).
  const auto assemble_jacobian = [&](const JointPoint& pt) {
    const DenseVector a = split_a(pt.theta);
    const DenseVector c = split_c(pt.theta);
    const std::vector<DenseMatrix> deriv = model.basis_derivatives(a, data);
    const std::size_t m = pt.phi.rows();
    DenseMatrix jac(m, n + k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) jac(i, j) = -pt.phi(i, j);
    for (std::size_t t = 0; t < k; ++t) {
      const DenseVector col = matvec(deriv[t], c);
      for (std::size_t i = 0; i < m; ++i) jac(i, n + t) = -col[i];
    }
    return jac;
  };

  DenseMatrix jac = assemble_jacobian(*current);
  DenseVector grad = matvec_transposed(jac, current->rho);
  double mu = cfg.lm_damping_init;
  out.trace.push_back({0, current->f, norm2(grad), 0.0, cfg.lm_damping_init, watch.seconds()});
  if (cfg.record_iterates) out.iterates.push_back(split_a(current->theta));
  out.termination = Termination::Budget;

  OptimizerConfig inner = cfg;
  inner.max_backtracks = inner_trial_budget(cfg);

  for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
    DenseMatrix h = gram(jac);
    double mu_used = 0.0;
    double mu_try = std::max(mu, kDampingFloor);
    std::optional<LineSearchResult> accepted;
    std::optional<JointPoint> cached;
    bool tiny_direction = false;
    double dir_norm = 0.0;
    while (true) {
      auto dir = solve_with_escalation(h, grad, mu_try, cfg.lm_damping_init,
                                       cfg.lm_damping_growth, mu_used);
      if (!dir) break;
      dir_norm = norm2(*dir);
      if (dir_norm < cfg.epsilon) {
        tiny_direction = true;
        break;
      }
      cached.reset();
      const auto objective = [&](const DenseVector& trial) -> double {
        auto pt = evaluate(trial);
        if (!pt) return kInf;
        const double f = pt->f;
        cached = std::move(pt);
        return f;
      };
      LineSearchResult ls =
          backtracking_search(objective, current->theta, *dir, grad, current->f, inner);
      if (ls.success) {
        accepted = std::move(ls);
        break;
      }
      mu_try = std::max(mu_used, kDampingFloor) * cfg.lm_damping_growth;
      if (mu_try > kDampingCeiling) break;
    }

    if (tiny_direction) {
      out.trace.push_back({iter, current->f, norm2(grad), dir_norm, mu_used, watch.seconds()});
      if (cfg.record_iterates) out.iterates.push_back(split_a(current->theta));
      out.termination = Termination::StepNorm;
      break;
    }
    if (!accepted) {
      out.termination = Termination::LineSearchFailure;
      break;
    }
    const LineSearchResult& ls = *accepted;
    mu = ls.beta == 1.0 ? std::max(mu_used / 2.0, kDampingFloor) : mu_used;

    JointPoint next = (cached && same_entries(cached->theta, ls.a_new))
                          ? std::move(*cached)
                          : *evaluate(ls.a_new);
    const double step_norm = norm2(next.theta - current->theta);
    const double f_delta = std::abs(next.f - current->f);
    current = std::move(next);
    jac = assemble_jacobian(*current);
    grad = matvec_transposed(jac, current->rho);
    out.trace.push_back({iter, current->f, norm2(grad), step_norm, mu_used, watch.seconds()});
    if (cfg.record_iterates) out.iterates.push_back(split_a(current->theta));

    if (step_norm < cfg.epsilon) {
      out.termination = Termination::StepNorm;
      break;
    }
    if (f_delta < cfg.epsilon) {
      out.termination = Termination::ObjectiveDelta;
      break;
    }
  }

  out.a_final = split_a(current->theta);
  out.c_final = split_c(current->theta);
  out.final_objective = current->f;
  return out;
}

FitResult run_alternating(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                          const OptimizerConfig& cfg) {
  if (cfg.variant != OptimizerVariant::Alternating)
    throw std::invalid_argument("run_alternating: config variant mismatch");
  validate(cfg);
  Stopwatch watch;
  FitResult out;

  const DenseVector y = model.target_vector(data);

  // Exact linear half-step via the reduced evaluation; the nonlinear
  // half-step is one damped GN step on a with c frozen.
  ReducedEvaluation eval = evaluate_reduced(model, data, a0, cfg.rank_tol);

  const auto frozen_c_jacobian = [&](const DenseVector& a, const DenseVector& c) {
    const std::vector<DenseMatrix> deriv = model.basis_derivatives(a, data);
    const std::size_t m = y.size();
    DenseMatrix jac(m, model.n_nonlinear);
    for (std::size_t t = 0; t < model.n_nonlinear; ++t) {
      const DenseVector col = matvec(deriv[t], c);
      for (std::size_t i = 0; i < m; ++i) jac(i, t) = -col[i];
    }
    return jac;
  };

  DenseMatrix jac = frozen_c_jacobian(eval.a, eval.c);
  DenseVector grad = matvec_transposed(jac, eval.r2);
  double mu = cfg.lm_damping_init;
  out.trace.push_back({0, eval.objective, norm2(grad), 0.0, cfg.lm_damping_init, watch.seconds()});
  if (cfg.record_iterates) out.iterates.push_back(eval.a);
  out.termination = Termination::Budget;

  OptimizerConfig inner = cfg;
  inner.max_backtracks = inner_trial_budget(cfg);

  for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
    DenseMatrix h = gram(jac);
    // Frozen-c objective: only the basis is rebuilt per trial.
    const DenseVector c = eval.c;
    const auto objective = [&](const DenseVector& trial) -> double {
      if (first_nonfinite(trial)) return kInf;
      const DenseMatrix phi = model.basis(trial, data);
      if (first_nonfinite(phi)) return kInf;
      const double f = 0.5 * norm2_squared(y - matvec(phi, c));
      return std::isfinite(f) ? f : kInf;
    };

    double mu_used = 0.0;
    double mu_try = std::max(mu, kDampingFloor);
    std::optional<LineSearchResult> accepted;
    bool tiny_direction = false;
    double dir_norm = 0.0;
    while (true) {
      auto dir = solve_with_escalation(h, grad, mu_try, cfg.lm_damping_init,
                                       cfg.lm_damping_growth, mu_used);
      if (!dir) break;
      dir_norm = norm2(*dir);
      if (dir_norm < cfg.epsilon) {
        tiny_direction = true;
        break;
      }
      LineSearchResult ls =
          backtracking_search(objective, eval.a, *dir, grad, eval.objective, inner);
      if (ls.success) {
        accepted = std::move(ls);
        break;
      }
      mu_try = std::max(mu_used, kDampingFloor) * cfg.lm_damping_growth;
      if (mu_try > kDampingCeiling) break;
    }

    if (tiny_direction) {
      out.trace.push_back({iter, eval.objective, norm2(grad), dir_norm, mu_used,
                           watch.seconds()});
      if (cfg.record_iterates) out.iterates.push_back(eval.a);
      out.termination = Termination::StepNorm;
      break;
    }
    if (!accepted) {
      out.termination = Termination::LineSearchFailure;
      break;
    }
    const LineSearchResult& ls = *accepted;
    mu = ls.beta == 1.0 ? std::max(mu_used / 2.0, kDampingFloor) : mu_used;

    const double step_norm = norm2(ls.a_new - eval.a);
    const double f_before = eval.objective;
    // Next sweep's exact c-solve doubles as the per-iteration bookkeeping.
    eval = evaluate_reduced(model, data, ls.a_new, cfg.rank_tol);
    jac = frozen_c_jacobian(eval.a, eval.c);
    grad = matvec_transposed(jac, eval.r2);
    out.trace.push_back({iter, eval.objective, norm2(grad), step_norm, mu_used, watch.seconds()});
    if (cfg.record_iterates) out.iterates.push_back(eval.a);

    if (step_norm < cfg.epsilon) {
      out.termination = Termination::StepNorm;
      break;
    }
    if (std::abs(eval.objective - f_before) < cfg.epsilon) {
      out.termination = Termination::ObjectiveDelta;
      break;
    }
  }

  out.a_final = eval.a;
  out.c_final = eval.c;
  out.final_objective = eval.objective;
  return out;
}

FitResult run_bcd(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                  const OptimizerConfig& cfg) {
  if (cfg.variant != OptimizerVariant::BCD)
    throw std::invalid_argument("run_bcd: config variant mismatch");
  validate(cfg);
  Stopwatch watch;
  FitResult out;

  const DenseVector y = model.target_vector(data);
  DenseVector a = a0;
  DenseVector c(model.n_linear, 0.0);  // block descent fits c itself
  DenseMatrix phi = model.basis(a, data);
  DenseVector rho = y - matvec(phi, c);
  double f = 0.5 * norm2_squared(rho);

  const auto gradient_c = [&]() {
    DenseVector g = matvec_transposed(phi, rho);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = -g[j];
    return g;
  };
  const auto gradient_a = [&]() {
    const std::vector<DenseMatrix> deriv = model.basis_derivatives(a, data);
    DenseVector g(model.n_nonlinear);
    for (std::size_t t = 0; t < model.n_nonlinear; ++t)
      g[t] = -dot(matvec(deriv[t], c), rho);
    return g;
  };

  DenseVector gc = gradient_c();
  DenseVector ga = gradient_a();
  const auto block_norm = [](const DenseVector& u, const DenseVector& v) {
    return std::sqrt(norm2_squared(u) + norm2_squared(v));
  };

  out.trace.push_back({0, f, block_norm(gc, ga), 0.0, 0.0, watch.seconds()});
  if (cfg.record_iterates) out.iterates.push_back(a);
  out.termination = Termination::Budget;

  for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
    double step_sq = 0.0;
    bool any_failure = false;
    bool any_progress = false;

    // c block: gradient step on the quadratic-in-c objective (fixed basis).
    if (norm2(gc) > 0.0) {
      const auto objective = [&](const DenseVector& trial) -> double {
        const double val = 0.5 * norm2_squared(y - matvec(phi, trial));
        return std::isfinite(val) ? val : kInf;
      };
      DenseVector d(gc.size());
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = -gc[j];
      const LineSearchResult ls = backtracking_search(objective, c, d, gc, f, cfg);
      if (ls.success) {
        step_sq += norm2_squared(ls.a_new - c);
        c = ls.a_new;
        rho = y - matvec(phi, c);
        f = ls.f_new;
        any_progress = true;
      } else {
        any_failure = true;
      }
    }

    // a block: gradient step with the new c frozen.
    ga = gradient_a();
    if (norm2(ga) > 0.0) {
      const auto objective = [&](const DenseVector& trial) -> double {
        if (first_nonfinite(trial)) return kInf;
        const DenseMatrix phi_trial = model.basis(trial, data);
        if (first_nonfinite(phi_trial)) return kInf;
        const double val = 0.5 * norm2_squared(y - matvec(phi_trial, c));
        return std::isfinite(val) ? val : kInf;
      };
      DenseVector d(ga.size());
      for (std::size_t t = 0; t < d.size(); ++t) d[t] = -ga[t];
      const LineSearchResult ls = backtracking_search(objective, a, d, ga, f, cfg);
      if (ls.success) {
        step_sq += norm2_squared(ls.a_new - a);
        a = ls.a_new;
        phi = model.basis(a, data);
        rho = y - matvec(phi, c);
        f = ls.f_new;
        any_progress = true;
      } else {
        any_failure = true;
      }
    }

    if (any_failure && !any_progress) {
      out.termination = Termination::LineSearchFailure;
      break;
    }

    const double step_norm = std::sqrt(step_sq);
    const double f_before = out.trace.back().objective;
    gc = gradient_c();
    ga = gradient_a();
    out.trace.push_back({iter, f, block_norm(gc, ga), step_norm, 0.0, watch.seconds()});
    if (cfg.record_iterates) out.iterates.push_back(a);

    if (step_norm < cfg.epsilon) {
      out.termination = Termination::StepNorm;
      break;
    }
    if (std::abs(f - f_before) < cfg.epsilon) {
      out.termination = Termination::ObjectiveDelta;
      break;
    }
  }

  out.a_final = a;
  out.c_final = c;
  out.final_objective = f;
  return out;
}

FitResult run_optimizer(const SeparableModel& model, const Dataset& data, const DenseVector& a0,
                        const OptimizerConfig& cfg) {
  switch (cfg.variant) {
    case OptimizerVariant::VP: return run_vp(model, data, a0, cfg);
    case OptimizerVariant::VPLR: return run_vplr(model, data, a0, cfg);
    case OptimizerVariant::Joint:
      // No elimination for joint optimization: linear parameters start at the
      // neutral zero vector and are fitted by the LM iteration itself.
      return run_joint(model, data, a0, DenseVector(model.n_linear, 0.0), cfg);
    case OptimizerVariant::Alternating: return run_alternating(model, data, a0, cfg);
    case OptimizerVariant::BCD: return run_bcd(model, data, a0, cfg);
  }
  throw std::invalid_argument("run_optimizer: unknown variant");
}

}  // namespace vproj
