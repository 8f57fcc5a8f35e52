// Benchmark comparing the OpenMP kernels against the serial reference
// implementations, plus thread scaling for the composite operations (QR
// factorization, basis evaluation, Jacobian assembly). The parallel kernels
// must agree with the serial ones bit for bit; the table reports the max
// absolute difference alongside the timings.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vproj/kernels.hpp"
#include "vproj/least_squares.hpp"
#include "vproj/models.hpp"
#include "vproj/reduced.hpp"
#include "vproj/rng.hpp"

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double time_best_of(const std::function<void()>& fn, int reps = 5) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    fn();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

double max_abs_diff(const vproj::DenseMatrix& a, const vproj::DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.storage().size(); ++i)
    m = std::max(m, std::abs(a.storage()[i] - b.storage()[i]));
  return m;
}

double max_abs_diff(const vproj::DenseVector& a, const vproj::DenseVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void report(const char* name, double serial_s, double parallel_s, double diff) {
  std::printf("%-24s %10.4f ms %10.4f ms %8.2fx   max|diff| %.1e\n", name, serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s, diff);
}

}  // namespace

int main() {
  using namespace vproj;
  const int threads = max_threads();
  std::printf("kernel benchmark (threads: %d)\n", threads);
  std::printf("%-24s %13s %13s %9s\n", "operation", "serial", "parallel", "speedup");

  Rng rng(7);
  const auto fill = [&rng](DenseMatrix& m) {
    for (double& x : m.storage()) x = rng.uniform(-1.0, 1.0);
  };

  {
    DenseMatrix a(400, 300), b(300, 200);
    fill(a);
    fill(b);
    const DenseMatrix ref = serial::matmul(a, b);
    const DenseMatrix par = matmul(a, b);
    const double ts = time_best_of([&] { serial::matmul(a, b); });
    const double tp = time_best_of([&] { matmul(a, b); });
    report("matmul 400x300x200", ts, tp, max_abs_diff(ref, par));
  }
  {
    DenseMatrix a(2000, 64);
    fill(a);
    const DenseMatrix ref = serial::gram(a);
    const DenseMatrix par = gram(a);
    const double ts = time_best_of([&] { serial::gram(a); });
    const double tp = time_best_of([&] { gram(a); });
    report("gram 2000x64", ts, tp, max_abs_diff(ref, par));
  }
  {
    DenseMatrix a(1500, 800);
    fill(a);
    DenseVector x(800);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
    const DenseVector ref = serial::matvec(a, x);
    const DenseVector par = matvec(a, x);
    const double ts = time_best_of([&] { serial::matvec(a, x); });
    const double tp = time_best_of([&] { matvec(a, x); });
    report("matvec 1500x800", ts, tp, max_abs_diff(ref, par));
  }

  // Composite operations: single-thread run vs all threads. The parallel
  // loops only split independent outputs, so the results must be identical.
  {
    DenseMatrix a(1000, 64);
    fill(a);
    set_threads(1);
    const LeastSquaresFactorization ref = factorize_least_squares(a);
    const double ts = time_best_of([&] { factorize_least_squares(a); });
    set_threads(threads);
    const LeastSquaresFactorization par = factorize_least_squares(a);
    const double tp = time_best_of([&] { factorize_least_squares(a); });
    report("qr factorize 1000x64", ts, tp, max_abs_diff(ref.qr, par.qr));
  }
  {
    const SeparableModel model = rbf_network_model(8, 8);
    const Dataset data = surrogate_concrete_table(1030, 3);
    Rng arng(11);
    DenseVector a(model.n_nonlinear);
    for (std::size_t i = 0; i < a.size(); ++i)
      a[i] = arng.uniform(model.feasible_lower[i], model.feasible_upper[i]);
    set_threads(1);
    const DenseMatrix ref = model.basis(a, data);
    const double ts = time_best_of([&] { model.basis(a, data); });
    set_threads(threads);
    const DenseMatrix par = model.basis(a, data);
    const double tp = time_best_of([&] { model.basis(a, data); });
    report("rbf basis 1030x8", ts, tp, max_abs_diff(ref, par));

    const ReducedEvaluation eval = evaluate_reduced(model, data, a);
    set_threads(1);
    const DenseMatrix jref = jacobian(model, data, eval, JacobianVariant::GolubPereyra);
    const double tjs = time_best_of([&] {
      jacobian(model, data, eval, JacobianVariant::GolubPereyra);
    });
    set_threads(threads);
    const DenseMatrix jpar = jacobian(model, data, eval, JacobianVariant::GolubPereyra);
    const double tjp = time_best_of([&] {
      jacobian(model, data, eval, JacobianVariant::GolubPereyra);
    });
    report("gp jacobian 1030x72", tjs, tjp, max_abs_diff(jref, jpar));
  }

  return 0;
}
