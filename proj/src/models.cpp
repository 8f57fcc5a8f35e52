#include "vproj/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include "vproj/rng.hpp"

namespace vproj {

namespace {

void check_nonlinear_len(const SeparableModel& model, const DenseVector& a) {
  if (a.size() != model.n_nonlinear)
    throw std::invalid_argument(model.name + ": expected " + std::to_string(model.n_nonlinear) +
                                " nonlinear parameters, got " + std::to_string(a.size()));
}

// Lag vector x_{t-1} = (y_{t-1}, ..., y_{t-d}).
void fill_lag(const DenseVector& series, std::size_t t, std::size_t d, std::vector<double>& x) {
  for (std::size_t l = 0; l < d; ++l) x[l] = series[t - 1 - l];
}

double sq_dist(const std::vector<double>& x, const double* z, std::size_t d) {
  double s = 0.0;
  for (std::size_t l = 0; l < d; ++l) {
    const double diff = x[l] - z[l];
    s += diff * diff;
  }
  return s;
}

// Median of pairwise squared distances among up to `cap` seeded sample rows.
double median_pairwise_sqdist(const std::vector<std::vector<double>>& points, Rng& rng,
                              std::size_t cap = 64) {
  std::vector<std::size_t> pick(points.size());
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  while (pick.size() > cap) pick.erase(pick.begin() + std::ptrdiff_t(rng.index(pick.size())));
  std::vector<double> dists;
  for (std::size_t i = 0; i < pick.size(); ++i)
    for (std::size_t j = i + 1; j < pick.size(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < points[pick[i]].size(); ++l) {
        const double diff = points[pick[i]][l] - points[pick[j]][l];
        s += diff * diff;
      }
      dists.push_back(s);
    }
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + std::ptrdiff_t(dists.size() / 2), dists.end());
  return std::max(dists[dists.size() / 2], 1e-12);
}

std::vector<std::size_t> draw_distinct(Rng& rng, std::size_t count, std::size_t upper) {
  if (count > upper) throw std::invalid_argument("draw_distinct: not enough rows to draw from");
  std::set<std::size_t> chosen;
  while (chosen.size() < count) chosen.insert(std::size_t(rng.index(upper)));
  return {chosen.begin(), chosen.end()};
}

}  // namespace

SeparableModel complex_exponential_model() {
  SeparableModel model;
  model.name = "complex-exp";
  model.n_linear = 3;
  model.n_nonlinear = 4;
  model.feasible_lower = DenseVector(4, 0.5);
  model.feasible_upper = DenseVector(4, 40.0);

  const auto check_inputs = [](const Dataset& data) {
    if (data.inputs.cols() != 1 || data.inputs.rows() < 1)
      throw std::invalid_argument("complex-exp: expects a single scalar input column");
  };

  model.basis = [check_inputs, model](const DenseVector& a, const Dataset& data) {
    check_nonlinear_len(model, a);
    check_inputs(data);
    const std::size_t m = data.inputs.rows();
    DenseMatrix phi(m, 3);
    const double a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3];
    const std::int64_t mm = std::int64_t(m);
#pragma omp parallel for schedule(static) if (mm > 512)
    for (std::int64_t i = 0; i < mm; ++i) {
      const double x = data.inputs(std::size_t(i), 0);
      const double x2 = x * x;
      phi(std::size_t(i), 0) = std::exp(-a2 * x2) * std::cos(a3 * x);
      phi(std::size_t(i), 1) = std::exp(-a1 * x2) * std::cos(a2 * x);
      phi(std::size_t(i), 2) = std::exp(-a4 * x2) * std::sin(a1 * x);
    }
    return phi;
  };

  model.basis_derivatives = [check_inputs, model](const DenseVector& a, const Dataset& data) {
    check_nonlinear_len(model, a);
    check_inputs(data);
    const std::size_t m = data.inputs.rows();
    std::vector<DenseMatrix> deriv(4, DenseMatrix(m, 3, 0.0));
    const double a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3];
    const std::int64_t mm = std::int64_t(m);
#pragma omp parallel for schedule(static) if (mm > 512)
    for (std::int64_t i = 0; i < mm; ++i) {
      const std::size_t r = std::size_t(i);
      const double x = data.inputs(r, 0);
      const double x2 = x * x;
      const double e1 = std::exp(-a1 * x2);
      const double e2 = std::exp(-a2 * x2);
      const double e4 = std::exp(-a4 * x2);
      deriv[0](r, 1) = -x2 * e1 * std::cos(a2 * x);
      deriv[0](r, 2) = x * e4 * std::cos(a1 * x);
      deriv[1](r, 0) = -x2 * e2 * std::cos(a3 * x);
      deriv[1](r, 1) = -x * e1 * std::sin(a2 * x);
      deriv[2](r, 0) = -x * e2 * std::sin(a3 * x);
      deriv[3](r, 2) = -x2 * e4 * std::sin(a1 * x);
    }
    return deriv;
  };

  model.target_vector = [](const Dataset& data) { return data.targets; };
  return model;
}

TrueParameters complex_exponential_truth(double noise_sigma) {
  TrueParameters truth;
  truth.c_true = DenseVector{2.0, 3.0, 2.0};
  truth.a_true = DenseVector{10.0, 15.0, 30.0, 8.0};
  truth.noise_sigma = noise_sigma;
  return truth;
}

DenseMatrix complex_exponential_grid() {
  // 200 samples on the half-open grid [0, 1): 0, 0.005, ..., 0.995.
  DenseMatrix grid(200, 1);
  for (std::size_t i = 0; i < 200; ++i) grid(i, 0) = 0.005 * double(i);
  return grid;
}

SeparableModel rbf_ar_model(std::size_t p, std::size_t m, std::size_t d) {
  if (p < 1 || m < 1 || d < 1) throw std::invalid_argument("rbf_ar_model: orders must be >= 1");
  SeparableModel model;
  model.name = "rbf-ar";
  model.n_linear = (p + 1) * (m + 1);
  model.n_nonlinear = m * (1 + d);
  model.feasible_lower = DenseVector(model.n_nonlinear, -2.0);
  model.feasible_upper = DenseVector(model.n_nonlinear, 2.0);
  for (std::size_t k = 0; k < m; ++k) {
    model.feasible_lower[k] = 0.05;
    model.feasible_upper[k] = 1.5;
  }

  const std::size_t q = std::max(p, d);
  const auto check_series = [q](const Dataset& data) {
    if (data.kind != DatasetKind::TimeSeries)
      throw std::invalid_argument("rbf-ar: expects a time-series dataset");
    if (data.size() < q + 1)
      throw std::invalid_argument("rbf-ar: series of length " + std::to_string(data.size()) +
                                  " is shorter than max(p, d) + 1 = " + std::to_string(q + 1));
  };

  model.basis = [=](const DenseVector& a, const Dataset& data) {
    check_nonlinear_len(model, a);
    check_series(data);
    const DenseVector& y = data.targets;
    const std::size_t rows = y.size() - q;
    DenseMatrix phi(rows, model.n_linear);
    const std::int64_t nrows = std::int64_t(rows);
#pragma omp parallel for schedule(static) if (nrows* std::int64_t(model.n_linear) > 16 * 1024)
    for (std::int64_t rr = 0; rr < nrows; ++rr) {
      const std::size_t t = q + std::size_t(rr);
      std::vector<double> x(d);
      fill_lag(y, t, d, x);
      std::vector<double> g(m + 1);
      g[0] = 1.0;
      for (std::size_t j = 1; j <= m; ++j)
        g[j] = std::exp(-a[j - 1] * sq_dist(x, a.data() + m + (j - 1) * d, d));
      for (std::size_t i = 0; i <= p; ++i) {
        const double u = i == 0 ? 1.0 : y[t - i];
        for (std::size_t j = 0; j <= m; ++j) phi(std::size_t(rr), i * (m + 1) + j) = u * g[j];
      }
    }
    return phi;
  };

  model.basis_derivatives = [=](const DenseVector& a, const Dataset& data) {
    check_nonlinear_len(model, a);
    check_series(data);
    const DenseVector& y = data.targets;
    const std::size_t rows = y.size() - q;
    std::vector<DenseMatrix> deriv(model.n_nonlinear, DenseMatrix(rows, model.n_linear, 0.0));
    const std::int64_t nrows = std::int64_t(rows);
#pragma omp parallel for schedule(static) if (nrows* std::int64_t(model.n_linear) > 4 * 1024)
    for (std::int64_t rr = 0; rr < nrows; ++rr) {
      const std::size_t t = q + std::size_t(rr);
      std::vector<double> x(d);
      fill_lag(y, t, d, x);
      for (std::size_t k = 1; k <= m; ++k) {
        const double lambda = a[k - 1];
        const double* z = a.data() + m + (k - 1) * d;
        const double dist2 = sq_dist(x, z, d);
        const double gk = std::exp(-lambda * dist2);
        for (std::size_t i = 0; i <= p; ++i) {
          const double u = i == 0 ? 1.0 : y[t - i];
          const std::size_t col = i * (m + 1) + k;
          deriv[k - 1](std::size_t(rr), col) = -dist2 * gk * u;
          for (std::size_t l = 0; l < d; ++l)
            deriv[m + (k - 1) * d + l](std::size_t(rr), col) =
                2.0 * lambda * (x[l] - z[l]) * gk * u;
        }
      }
    }
    return deriv;
  };

  model.target_vector = [=](const Dataset& data) {
    check_series(data);
    const std::size_t rows = data.size() - q;
    DenseVector targets(rows);
    for (std::size_t rr = 0; rr < rows; ++rr) targets[rr] = data.targets[q + rr];
    return targets;
  };
  return model;
}

SeparableModel rbf_network_model(std::size_t m_centers, std::size_t d) {
  if (m_centers < 1 || d < 1)
    throw std::invalid_argument("rbf_network_model: sizes must be >= 1");
  SeparableModel model;
  model.name = "rbf-net";
  model.n_linear = m_centers;
  model.n_nonlinear = m_centers * (1 + d);
  model.feasible_lower = DenseVector(model.n_nonlinear, -2.0);
  model.feasible_upper = DenseVector(model.n_nonlinear, 2.0);
  for (std::size_t k = 0; k < m_centers; ++k) {
    model.feasible_lower[k] = 0.05;
    model.feasible_upper[k] = 2.0;
  }

  const auto check_inputs = [d](const Dataset& data) {
    if (data.inputs.cols() != d)
      throw std::invalid_argument("rbf-net: expected " + std::to_string(d) + " feature columns");
  };

  model.basis = [=](const DenseVector& a, const Dataset& data) {
    check_nonlinear_len(model, a);
    check_inputs(data);
    const std::size_t rows = data.inputs.rows();
    DenseMatrix phi(rows, m_centers);
    const std::int64_t nrows = std::int64_t(rows);
#pragma omp parallel for schedule(static) if (nrows* std::int64_t(m_centers) > 16 * 1024)
    for (std::int64_t i = 0; i < nrows; ++i) {
      const double* xrow = data.inputs.row(std::size_t(i));
      for (std::size_t k = 0; k < m_centers; ++k) {
        const double* z = a.data() + m_centers + k * d;
        double dist2 = 0.0;
        for (std::size_t l = 0; l < d; ++l) {
          const double diff = xrow[l] - z[l];
          dist2 += diff * diff;
        }
        phi(std::size_t(i), k) = std::exp(-a[k] * dist2);
      }
    }
    return phi;
  };

  model.basis_derivatives = [=](const DenseVector& a, const Dataset& data) {
    check_nonlinear_len(model, a);
    check_inputs(data);
    const std::size_t rows = data.inputs.rows();
    std::vector<DenseMatrix> deriv(model.n_nonlinear, DenseMatrix(rows, m_centers, 0.0));
    const std::int64_t nrows = std::int64_t(rows);
#pragma omp parallel for schedule(static) if (nrows* std::int64_t(m_centers) > 4 * 1024)
    for (std::int64_t i = 0; i < nrows; ++i) {
      const double* xrow = data.inputs.row(std::size_t(i));
      for (std::size_t k = 0; k < m_centers; ++k) {
        const double* z = a.data() + m_centers + k * d;
        double dist2 = 0.0;
        for (std::size_t l = 0; l < d; ++l) {
          const double diff = xrow[l] - z[l];
          dist2 += diff * diff;
        }
        const double gk = std::exp(-a[k] * dist2);
        deriv[k](std::size_t(i), k) = -dist2 * gk;
        for (std::size_t l = 0; l < d; ++l)
          deriv[m_centers + k * d + l](std::size_t(i), k) = 2.0 * a[k] * (xrow[l] - z[l]) * gk;
      }
    }
    return deriv;
  };

  model.target_vector = [](const Dataset& data) { return data.targets; };
  return model;
}

Dataset generate_synthetic(const SeparableModel& model, const TrueParameters& truth,
                           const DenseMatrix& inputs, std::uint64_t seed) {
  Dataset data;
  data.kind = DatasetKind::Tabular;
  data.inputs = inputs;
  data.targets = DenseVector(inputs.rows(), 0.0);

  const DenseMatrix phi = model.basis(truth.a_true, data);
  if (truth.c_true.size() != model.n_linear)
    throw std::invalid_argument("generate_synthetic: c_true length mismatch");
  Rng rng(seed);
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    double value = 0.0;
    for (std::size_t j = 0; j < phi.cols(); ++j) value += phi(i, j) * truth.c_true[j];
    data.targets[i] = value + (truth.noise_sigma > 0.0 ? truth.noise_sigma * rng.normal() : 0.0);
  }
  return data;
}

DenseVector rbf_ar_default_init(const Dataset& series, std::size_t p, std::size_t m,
                                std::size_t d, std::uint64_t seed) {
  const std::size_t q = std::max(p, d);
  if (series.size() < q + 1 + m)
    throw std::invalid_argument("rbf_ar_default_init: series too short");
  std::vector<std::vector<double>> lags;
  for (std::size_t t = q; t < series.size(); ++t) {
    std::vector<double> x(d);
    fill_lag(series.targets, t, d, x);
    lags.push_back(std::move(x));
  }
  Rng rng(seed);
  const auto chosen = draw_distinct(rng, m, lags.size());
  const double med = median_pairwise_sqdist(lags, rng);

  DenseVector a(m * (1 + d));
  for (std::size_t k = 0; k < m; ++k) {
    a[k] = 1.0 / med;
    for (std::size_t l = 0; l < d; ++l) a[m + k * d + l] = lags[chosen[k]][l];
  }
  return a;
}

DenseVector rbf_network_default_init(const Dataset& data, std::size_t m_centers,
                                     std::uint64_t seed) {
  const std::size_t rows = data.inputs.rows();
  const std::size_t d = data.inputs.cols();
  if (rows < m_centers) throw std::invalid_argument("rbf_network_default_init: too few rows");
  std::vector<std::vector<double>> points(rows, std::vector<double>(d));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t l = 0; l < d; ++l) points[i][l] = data.inputs(i, l);

  Rng rng(seed);
  const auto chosen = draw_distinct(rng, m_centers, rows);
  std::vector<std::vector<double>> centers;
  for (std::size_t idx : chosen) centers.push_back(points[idx]);
  const double med =
      centers.size() >= 2 ? median_pairwise_sqdist(centers, rng) : median_pairwise_sqdist(points, rng);

  DenseVector a(m_centers * (1 + d));
  for (std::size_t k = 0; k < m_centers; ++k) {
    a[k] = 1.0 / med;
    for (std::size_t l = 0; l < d; ++l) a[m_centers + k * d + l] = centers[k][l];
  }
  return a;
}

Dataset surrogate_ozone_series(std::size_t n, std::uint64_t seed) {
  // Regime-switching autoregression on the log scale, shifted above the 260
  // floor the ozone transform expects. The AR coefficients swing with the
  // recent level through two sharp Gaussian gates, which no single-center
  // RBF-AR model can represent exactly.
  Rng rng(seed);
  Dataset data;
  data.kind = DatasetKind::TimeSeries;
  data.targets = DenseVector(n);
  const double mean_log = 4.3;
  double g1 = mean_log, g2 = mean_log;
  for (std::size_t t = 0; t < n; ++t) {
    const double low = std::exp(-18.0 * (g1 - 4.05) * (g1 - 4.05));
    const double high = std::exp(-14.0 * (g1 - 4.55) * (g1 - 4.55));
    const double phi1 = 0.25 + 0.55 * low - 0.45 * high;
    const double phi2 = 0.15 - 0.4 * low + 0.3 * high;
    const double seasonal = 0.22 * std::sin(2.0 * std::numbers::pi * double(t) / 12.0);
    const double g = mean_log + phi1 * (g1 - mean_log) + phi2 * (g2 - mean_log) + seasonal +
                     0.16 * rng.normal();
    data.targets[t] = 260.0 + std::exp(g);
    g2 = g1;
    g1 = g;
  }
  return data;
}

Dataset surrogate_concrete_table(std::size_t n, std::uint64_t seed) {
  // Mix designs live near a low-dimensional manifold: three latent recipe
  // factors drive all eight features (plus small measurement noise), and
  // strength is a smooth nonlinear function of the same factors.
  Rng rng(seed);
  Dataset data;
  data.kind = DatasetKind::Tabular;
  data.inputs = DenseMatrix(n, 8);
  data.targets = DenseVector(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u1 = rng.uniform(0.0, 1.0);  // binder richness
    const double u2 = rng.uniform(0.0, 1.0);  // substitution level
    const double u3 = rng.uniform(0.0, 1.0);  // curing age
    const auto jitter = [&rng] { return 0.06 * rng.normal(); };

    const double cement = 100.0 + 450.0 * std::clamp(u1 * (1.0 - 0.5 * u2) + jitter(), 0.0, 1.0);
    const double slag = 360.0 * std::clamp(u2 * 0.9 + 0.1 * u1 + jitter(), 0.0, 1.0);
    const double flyash = 200.0 * std::clamp(0.8 * u2 * (1.0 - u1) + jitter(), 0.0, 1.0);
    const double water = 120.0 + 130.0 * std::clamp(0.75 - 0.45 * u1 + 0.15 * u2 + jitter(), 0.0, 1.0);
    const double superplast = 32.0 * std::clamp(0.8 * u1 * u2 + jitter(), 0.0, 1.0);
    const double coarse = 800.0 + 350.0 * std::clamp(0.5 + 0.3 * u1 - 0.25 * u2 + jitter(), 0.0, 1.0);
    const double fine = 590.0 + 405.0 * std::clamp(0.5 - 0.2 * u1 + 0.2 * u2 + jitter(), 0.0, 1.0);
    const double age = std::floor(std::exp(1.0 + 4.9 * u3)) / std::exp(1.0);

    const double binder = cement + 0.85 * slag + 0.6 * flyash;
    const double wb = water / binder;
    const double agefac = std::log(1.0 + age) / std::log(200.0);
    double strength = 75.0 * std::exp(-3.2 * wb) * (0.25 + 0.75 * agefac);
    strength += 9.0 * std::exp(-30.0 * (u1 - 0.55) * (u1 - 0.55));
    strength += 2.5 * rng.normal();

    data.inputs(i, 0) = cement;
    data.inputs(i, 1) = slag;
    data.inputs(i, 2) = flyash;
    data.inputs(i, 3) = water;
    data.inputs(i, 4) = superplast;
    data.inputs(i, 5) = coarse;
    data.inputs(i, 6) = fine;
    data.inputs(i, 7) = age;
    data.targets[i] = std::max(strength, 2.0);
  }
  return data;
}

}  // namespace vproj
