#ifndef VPROJ_METRICS_HPP
#define VPROJ_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "vproj/matrix.hpp"

namespace vproj {

// (1/n) sum (y_i - y_hat_i)^2.
double mse(const DenseVector& y, const DenseVector& y_hat);

// One-step-ahead predictions of a fitted RBF-AR(p, m, d) model over
// t = test_start .. len-1, using true lagged values as regressors (the test
// segment is appended to the training series). test_start must leave
// max(p, d) points of history.
DenseVector rbf_ar_forecast(std::size_t p, std::size_t m, std::size_t d, const DenseVector& a,
                            const DenseVector& c, const DenseVector& series,
                            std::size_t test_start);

// Fit of log e_{i+1} = log K + q log e_i over the last contiguous window
// where the error sequence strictly decreases and stays above the noise
// floor.
struct RateEstimate {
  double order = 0.0;   // fitted exponent q
  double factor = 0.0;  // fitted K
  std::size_t window_begin = 0;
  std::size_t window_end = 0;  // inclusive range of error indices used
  double fit_residual = 0.0;   // RMS residual of the log-log regression
  std::string regime;          // "small" or "large", set by the caller
};

// Returns nullopt when fewer than 4 usable pairs remain above the floor.
// Negative error entries are rejected.
std::optional<RateEstimate> estimate_convergence_order(const std::vector<double>& errors,
                                                       double noise_floor);

// Floor at 100 machine epsilons of the reference scale.
double rate_noise_floor(double reference_scale);

}  // namespace vproj

#endif  // VPROJ_METRICS_HPP
