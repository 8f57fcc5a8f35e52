#ifndef VPROJ_DATASET_HPP
#define VPROJ_DATASET_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "vproj/matrix.hpp"

namespace vproj {

enum class DatasetKind { Tabular, TimeSeries };

// Observation container. Tabular data carries an m x d feature matrix plus a
// target per row; a time series is a single ordered sequence stored in
// `targets` (inputs stays empty) whose lagged values double as regressors.
struct Dataset {
  DatasetKind kind = DatasetKind::Tabular;
  DenseMatrix inputs;
  DenseVector targets;

  std::size_t size() const { return targets.size(); }
  std::size_t feature_count() const { return inputs.cols(); }
};

// CSV ingestion. Tabular schema: header row, then d feature columns followed
// by one target column. Time-series schema: header row, then one value per
// row. Ragged rows, non-numeric cells, and empty files are rejected with the
// offending line number.
Dataset load_csv_dataset(const std::string& path, DatasetKind schema);

// Train/test split covering all rows. Time-series splits are prefix/suffix;
// tabular splits draw a seeded permutation.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, std::size_t n_train,
                                          std::uint64_t seed = 0);

// Elementwise ln(y - 260); entries at or below 260 are rejected with index.
DenseVector ozone_transform(const DenseVector& y);

// Per-column affine rescaling fitted on a training split (zero mean, unit
// variance); constant columns are left centered only.
struct Standardizer {
  DenseVector mean;
  DenseVector scale;

  static Standardizer fit(const DenseMatrix& x);
  static Standardizer fit(const DenseVector& v);
  DenseMatrix apply(const DenseMatrix& x) const;
  DenseVector apply(const DenseVector& v) const;
};

}  // namespace vproj

#endif  // VPROJ_DATASET_HPP
