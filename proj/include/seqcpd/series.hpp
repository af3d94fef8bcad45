#pragma once

#include "seqcpd/types.hpp"

namespace seqcpd {

enum class DataRole { unlabeled, labeled, timeseries };

/// Immutable T x d observation matrix with prefix sums of z and z z^T.
///
/// Segments are half-open row ranges [begin, end). For labeled data column 0
/// is the response and the remaining columns are covariates.
class SeriesData {
 public:
  SeriesData() = default;
  SeriesData(Matrix values, DataRole role);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  DataRole role() const { return role_; }
  const Matrix& values() const { return values_; }

  /// Sum of rows in [begin, end).
  Vector segment_sum(Index begin, Index end) const;
  /// Sum of z z^T over rows in [begin, end).
  Matrix segment_cross(Index begin, Index end) const;
  /// Allocation-free entry (j, k) of segment_cross.
  double cross_entry(Index begin, Index end, Index j, Index k) const {
    const Index c = k * cols() + j;
    return cross_(end, c) - cross_(begin, c);
  }
  double sum_entry(Index begin, Index end, Index j) const { return sums_(end, j) - sums_(begin, j); }

  /// Number of covariate columns for labeled data.
  Index covariates() const { return role_ == DataRole::labeled ? cols() - 1 : cols(); }

 private:
  Matrix values_;
  DataRole role_ = DataRole::unlabeled;
  Matrix sums_;   // (T+1) x d
  Matrix cross_;  // (T+1) x d*d, column-major flattening of z z^T
};

}  // namespace seqcpd
