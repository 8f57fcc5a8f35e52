#ifndef VPROJ_MATRIX_HPP
#define VPROJ_MATRIX_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vproj {

// Dense row-major matrix of doubles. Shapes are fixed at construction;
// entries are mutable so evaluators can fill them in place.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix eye(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) eye(i, i) = 1.0;
    return eye;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t len, double fill = 0.0) : data_(len, fill) {}
  DenseVector(std::initializer_list<double> init) : data_(init) {}
  explicit DenseVector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::vector<double> data_;
};

// Serial reductions; summation order is fixed so results do not depend on
// thread count anywhere in the library.
double dot(const DenseVector& a, const DenseVector& b);
double norm2(const DenseVector& v);
double norm2_squared(const DenseVector& v);
double norm_inf(const DenseVector& v);
double frobenius_norm(const DenseMatrix& m);

DenseVector operator+(const DenseVector& a, const DenseVector& b);
DenseVector operator-(const DenseVector& a, const DenseVector& b);
DenseVector operator*(double alpha, const DenseVector& v);

// x + alpha * y
DenseVector add_scaled(const DenseVector& x, double alpha, const DenseVector& y);

// Index of the first NaN/Inf entry, if any.
std::optional<std::size_t> first_nonfinite(const DenseVector& v);
std::optional<std::pair<std::size_t, std::size_t>> first_nonfinite(const DenseMatrix& m);

// Throws std::invalid_argument naming the offending coordinate.
void require_finite(const DenseVector& v, const std::string& what);
void require_finite(const DenseMatrix& m, const std::string& what);

}  // namespace vproj

#endif  // VPROJ_MATRIX_HPP
