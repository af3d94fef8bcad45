#pragma once

#include "seqcpd/cost_model.hpp"
#include "seqcpd/series.hpp"

namespace seqcpd {

/// Mean change with covariance fixed at the Rice estimate.
class MeanModel : public CostModel {
 public:
  explicit MeanModel(SeriesData data);
  /// Uses the given covariance instead of the Rice estimate.
  MeanModel(SeriesData data, const Matrix& sigma);

  std::string name() const override { return "mean"; }
  Index size() const override { return data_.rows(); }
  Index param_dim() const override { return data_.cols(); }
  double default_vanilla() const override { return 1.0; }

  bool has_exact_cost() const override { return true; }
  double exact_cost(Index begin, Index end) const override;
  SegmentFit fit(Index begin, Index end) const override;

  bool has_loss() const override { return true; }
  double point_loss(Index begin, Index i, const Vector& theta) const override;
  double segment_loss(Index begin, Index end, const Vector& theta) const override;

  bool has_derivatives() const override { return true; }
  Vector point_gradient(Index begin, Index i, const Vector& theta) const override;
  Matrix point_hessian(Index begin, Index i, const Vector& theta) const override;
  Matrix segment_hessian(Index begin, Index end, const Vector& theta) const override;

  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  const Matrix& sigma_hat() const { return sigma_; }

 private:
  void init(const Matrix& sigma);
  SeriesData data_;
  Matrix sigma_;
  Matrix precision_;
  Vector mean_offset_;
  double log_det_ = 0.0;
};

/// Covariance change around the global mean.
class VarianceModel : public CostModel {
 public:
  explicit VarianceModel(const SeriesData& data);

  std::string name() const override { return "variance"; }
  Index size() const override { return centered_.rows(); }
  Index param_dim() const override { return d_ * (d_ + 1) / 2; }
  double default_vanilla() const override { return 1.0; }

  bool has_exact_cost() const override { return true; }
  double exact_cost(Index begin, Index end) const override;
  SegmentFit fit(Index begin, Index end) const override;
  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  const Vector& global_mean() const { return mean_; }

 private:
  SeriesData centered_;
  Vector mean_;
  Index d_;
  double floor_;
};

/// Joint mean and covariance change.
class MeanVarianceModel : public CostModel {
 public:
  explicit MeanVarianceModel(const SeriesData& data);

  std::string name() const override { return "meanvariance"; }
  Index size() const override { return centered_.rows(); }
  Index param_dim() const override { return d_ + d_ * (d_ + 1) / 2; }
  double default_vanilla() const override { return 1.0; }

  bool has_exact_cost() const override { return true; }
  double exact_cost(Index begin, Index end) const override;
  SegmentFit fit(Index begin, Index end) const override;
  Vector residuals(Index begin, Index end, const Vector& theta) const override;

 private:
  SeriesData centered_;
  Vector mean_;
  Index d_;
  double floor_;
};

/// Median change with Laplace scale from laplace_rice.
class MedianModel : public CostModel {
 public:
  explicit MedianModel(const SeriesData& data);
  MedianModel(const SeriesData& data, double sigma2);

  std::string name() const override { return "median"; }
  Index size() const override { return x_.size(); }
  Index param_dim() const override { return 1; }
  double default_vanilla() const override { return 1.0; }

  bool has_exact_cost() const override { return true; }
  double exact_cost(Index begin, Index end) const override;
  SegmentFit fit(Index begin, Index end) const override;

  bool has_loss() const override { return true; }
  double point_loss(Index begin, Index i, const Vector& theta) const override;

  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  double sigma2() const { return sigma2_; }

 private:
  Vector x_;
  double sigma2_;
  double scale_;
};

/// Lower-middle order statistic of a segment.
double lower_median(const Vector& values, Index begin, Index end);

}  // namespace seqcpd
