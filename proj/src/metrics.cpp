#include "vproj/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vproj/kernels.hpp"
#include "vproj/models.hpp"

namespace vproj {

double mse(const DenseVector& y, const DenseVector& y_hat) {
  if (y.size() != y_hat.size()) throw std::invalid_argument("mse: length mismatch");
  if (y.empty()) throw std::invalid_argument("mse: empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double diff = y[i] - y_hat[i];
    s += diff * diff;
  }
  return s / double(y.size());
}

DenseVector rbf_ar_forecast(std::size_t p, std::size_t m, std::size_t d, const DenseVector& a,
                            const DenseVector& c, const DenseVector& series,
                            std::size_t test_start) {
  const std::size_t q = std::max(p, d);
  if (test_start < q)
    throw std::invalid_argument("rbf_ar_forecast: test_start leaves insufficient history");
  if (test_start >= series.size())
    throw std::invalid_argument("rbf_ar_forecast: empty test range");

  const SeparableModel model = rbf_ar_model(p, m, d);
  Dataset full;
  full.kind = DatasetKind::TimeSeries;
  full.targets = series;
  const DenseMatrix phi = model.basis(a, full);
  const DenseVector y_hat = matvec(phi, c);

  // phi row rr corresponds to time t = q + rr.
  DenseVector out(series.size() - test_start);
  for (std::size_t t = test_start; t < series.size(); ++t) out[t - test_start] = y_hat[t - q];
  return out;
}

double rate_noise_floor(double reference_scale) {
  return 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, reference_scale);
}

std::optional<RateEstimate> estimate_convergence_order(const std::vector<double>& errors,
                                                       double noise_floor) {
  for (double e : errors)
    if (e < 0.0 || !std::isfinite(e))
      throw std::invalid_argument("estimate_convergence_order: errors must be finite and >= 0");

  // Last index still above the floor.
  std::size_t end = errors.size();
  while (end > 0 && errors[end - 1] <= noise_floor) --end;
  if (end == 0) return std::nullopt;
  --end;  // inclusive

  // Extend backward while strictly decreasing above the floor.
  std::size_t begin = end;
  while (begin > 0 && errors[begin - 1] > errors[begin] && errors[begin - 1] > noise_floor)
    --begin;

  if (end - begin < 4) return std::nullopt;

  const std::size_t pairs = end - begin;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double x = std::log(errors[i]);
    const double y = std::log(errors[i + 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double np = double(pairs);
  const double denom = np * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  const double slope = (np * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / np;

  double res = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double pred = intercept + slope * std::log(errors[i]);
    const double diff = std::log(errors[i + 1]) - pred;
    res += diff * diff;
  }

  RateEstimate est;
  est.order = slope;
  est.factor = std::exp(intercept);
  est.window_begin = begin;
  est.window_end = end;
  est.fit_residual = std::sqrt(res / np);
  return est;
}

}  // namespace vproj
