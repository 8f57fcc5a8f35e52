#ifndef VPROJ_MODELS_HPP
#define VPROJ_MODELS_HPP

#include <cstdint>

#include "vproj/separable_model.hpp"

namespace vproj {

// Three-term complex exponential model on scalar inputs x:
//   f(x) = c1 e^{-a2 x^2} cos(a3 x) + c2 e^{-a1 x^2} cos(a2 x)
//        + c3 e^{-a4 x^2} sin(a1 x)
// with n_linear = 3 and n_nonlinear = 4.
SeparableModel complex_exponential_model();

// Reference parameters c = (2, 3, 2), a = (10, 15, 30, 8).
TrueParameters complex_exponential_truth(double noise_sigma = 0.1);

// The 200-point sampling grid x = 0, 0.005, ..., 0.995.
DenseMatrix complex_exponential_grid();

// RBF-network autoregression of orders (p, m, d):
//   y_t = phi_0(x) + sum_i phi_i(x) y_{t-i},
//   phi_i(x) = c_{i,0} + sum_j c_{i,j} exp(-lambda_j ||x - z_j||^2),
//   x = (y_{t-1}, ..., y_{t-d}).
// Nonlinear parameters are (lambda_1..lambda_m, z_1..z_m) with z_k in R^d;
// linear parameters c_{i,j} are ordered (i, j) lexicographically. Usable rows
// start at t = max(p, d); shorter series are rejected.
SeparableModel rbf_ar_model(std::size_t p, std::size_t m, std::size_t d);

// RBF network y(x) = sum_k c_k exp(-r_k ||x - z_k||^2) on d-dimensional rows;
// nonlinear parameters (r_1..r_m, z_1..z_m).
SeparableModel rbf_network_model(std::size_t m_centers, std::size_t d);

// Data-driven nonlinear initializations: centers drawn from distinct data
// rows (lag vectors for the AR model), radii from the inverse median pairwise
// squared distance among the drawn centers.
DenseVector rbf_ar_default_init(const Dataset& series, std::size_t p, std::size_t m,
                                std::size_t d, std::uint64_t seed);
DenseVector rbf_network_default_init(const Dataset& data, std::size_t m_centers,
                                     std::uint64_t seed);

// Seeded stand-ins shaped like the two real datasets, so every pipeline runs
// without external files; real CSVs are drop-in replacements.
Dataset surrogate_ozone_series(std::size_t n = 518, std::uint64_t seed = 1894);
Dataset surrogate_concrete_table(std::size_t n = 1030, std::uint64_t seed = 1998);

}  // namespace vproj

#endif  // VPROJ_MODELS_HPP
