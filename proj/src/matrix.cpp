#include "vproj/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace vproj {

double dot(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2_squared(const DenseVector& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * v[i];
  return s;
}

double norm2(const DenseVector& v) { return std::sqrt(norm2_squared(v)); }

double norm_inf(const DenseVector& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

double frobenius_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double x : m.storage()) s += x * x;
  return std::sqrt(s);
}

DenseVector operator+(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector add: length mismatch");
  DenseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

DenseVector operator-(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector sub: length mismatch");
  DenseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

DenseVector operator*(double alpha, const DenseVector& v) {
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * v[i];
  return out;
}

DenseVector add_scaled(const DenseVector& x, double alpha, const DenseVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("add_scaled: length mismatch");
  DenseVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * y[i];
  return out;
}

std::optional<std::size_t> first_nonfinite(const DenseVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return i;
  return std::nullopt;
}

std::optional<std::pair<std::size_t, std::size_t>> first_nonfinite(const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j))) return std::make_pair(i, j);
  return std::nullopt;
}

void require_finite(const DenseVector& v, const std::string& what) {
  if (auto bad = first_nonfinite(v))
    throw std::invalid_argument(what + ": non-finite entry at index " + std::to_string(*bad));
}

void require_finite(const DenseMatrix& m, const std::string& what) {
  if (auto bad = first_nonfinite(m))
    throw std::invalid_argument(what + ": non-finite entry at (" + std::to_string(bad->first) +
                                ", " + std::to_string(bad->second) + ")");
}

}  // namespace vproj
