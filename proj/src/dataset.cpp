#include "vproj/dataset.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "vproj/rng.hpp"

namespace vproj {

namespace {

std::vector<double> parse_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<double> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0') || errno == ERANGE)
      throw std::runtime_error("csv: non-numeric cell at line " + std::to_string(line_no));
    cells.push_back(value);
  }
  return cells;
}

}  // namespace

Dataset load_csv_dataset(const std::string& path, DatasetKind schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
  ++line_no;  // header row, contents ignored

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rows.push_back(parse_csv_line(line, line_no));
    if (rows.back().empty())
      throw std::runtime_error("csv: blank row at line " + std::to_string(line_no));
    if (rows.back().size() != rows.front().size())
      throw std::runtime_error("csv: ragged row at line " + std::to_string(line_no));
  }
  if (rows.empty()) throw std::runtime_error("csv: no data rows in " + path);

  Dataset data;
  data.kind = schema;
  const std::size_t m = rows.size();
  if (schema == DatasetKind::TimeSeries) {
    if (rows.front().size() != 1)
      throw std::runtime_error("csv: time-series schema expects one value per row in " + path);
    data.targets = DenseVector(m);
    for (std::size_t i = 0; i < m; ++i) data.targets[i] = rows[i][0];
  } else {
    if (rows.front().size() < 2)
      throw std::runtime_error("csv: tabular schema needs features plus a target in " + path);
    const std::size_t d = rows.front().size() - 1;
    data.inputs = DenseMatrix(m, d);
    data.targets = DenseVector(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < d; ++j) data.inputs(i, j) = rows[i][j];
      data.targets[i] = rows[i][d];
    }
  }
  return data;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, std::size_t n_train,
                                          std::uint64_t seed) {
  const std::size_t m = data.size();
  if (n_train < 1 || n_train >= m)
    throw std::invalid_argument("split_dataset: n_train out of range (1 <= n_train < " +
                                std::to_string(m) + ")");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (data.kind == DatasetKind::Tabular) {
    Rng rng(seed);
    for (std::size_t i = m; i-- > 1;) std::swap(order[i], order[rng.index(i + 1)]);
  }

  const auto take = [&](std::size_t begin, std::size_t end) {
    Dataset out;
    out.kind = data.kind;
    out.targets = DenseVector(end - begin);
    if (data.inputs.rows() > 0) out.inputs = DenseMatrix(end - begin, data.inputs.cols());
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t src = order[i];
      out.targets[i - begin] = data.targets[src];
      for (std::size_t j = 0; j < data.inputs.cols(); ++j)
        out.inputs(i - begin, j) = data.inputs(src, j);
    }
    return out;
  };
  return {take(0, n_train), take(n_train, m)};
}

DenseVector ozone_transform(const DenseVector& y) {
  DenseVector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 260.0))
      throw std::invalid_argument("ozone_transform: value at index " + std::to_string(i) +
                                  " is not above 260");
    out[i] = std::log(y[i] - 260.0);
  }
  return out;
}

Standardizer Standardizer::fit(const DenseMatrix& x) {
  const std::size_t m = x.rows();
  const std::size_t d = x.cols();
  Standardizer s;
  s.mean = DenseVector(d, 0.0);
  s.scale = DenseVector(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < m; ++i) mu += x(i, j);
    mu /= double(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) var += (x(i, j) - mu) * (x(i, j) - mu);
    var /= double(m);
    s.mean[j] = mu;
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Standardizer Standardizer::fit(const DenseVector& v) {
  DenseMatrix col(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) col(i, 0) = v[i];
  return fit(col);
}

DenseMatrix Standardizer::apply(const DenseMatrix& x) const {
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean[j]) / scale[j];
  return out;
}

DenseVector Standardizer::apply(const DenseVector& v) const {
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean[0]) / scale[0];
  return out;
}

}  // namespace vproj
