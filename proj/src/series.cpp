#include "seqcpd/series.hpp"

namespace seqcpd {

SeriesData::SeriesData(Matrix values, DataRole role) : values_(std::move(values)), role_(role) {
  const Index t = values_.rows();
  const Index d = values_.cols();
  if (t < 2) throw InvalidConfig("series needs at least 2 rows, got " + std::to_string(t));
  if (d < 1) throw InvalidConfig("series needs at least 1 column");
  if (role_ == DataRole::labeled && d < 2)
    throw InvalidConfig("labeled data needs a response column and at least one covariate");
  if (!values_.allFinite()) throw InvalidConfig("series contains non-finite entries");

  sums_ = Matrix::Zero(t + 1, d);
  cross_ = Matrix::Zero(t + 1, d * d);
  for (Index i = 0; i < t; ++i) {
    const auto z = values_.row(i);
    sums_.row(i + 1) = sums_.row(i) + z;
    for (Index b = 0; b < d; ++b)
      for (Index a = 0; a < d; ++a) cross_(i + 1, b * d + a) = cross_(i, b * d + a) + z(a) * z(b);
  }
}

Vector SeriesData::segment_sum(Index begin, Index end) const {
  return (sums_.row(end) - sums_.row(begin)).transpose();
}

Matrix SeriesData::segment_cross(Index begin, Index end) const {
  const Index d = cols();
  Vector flat = (cross_.row(end) - cross_.row(begin)).transpose();
  return Eigen::Map<Matrix>(flat.data(), d, d);
}

}  // namespace seqcpd
