#pragma once

#include "seqcpd/cost_model.hpp"
#include "seqcpd/series.hpp"

#include <functional>

namespace seqcpd {

using RowBlock = Eigen::Ref<const Matrix>;

/// User-supplied family. Every callback receives the rows of a segment (one
/// row for pointwise calls). `loss`, `gradient` and `hessian` are sums over
/// the given rows. A model with only `cost` is value-only and always runs the
/// exact path; a model with loss, gradient and hessian supports SeGD and gets
/// its exact cost from exact_minimize unless `cost` is also given.
struct CustomFunctions {
  std::string name = "custom";
  Index param_dim = 0;
  double default_vanilla = 0.0;
  std::function<double(const RowBlock&)> cost;
  std::function<double(const RowBlock&, const Vector&)> loss;
  std::function<Vector(const RowBlock&, const Vector&)> gradient;
  std::function<Matrix(const RowBlock&, const Vector&)> hessian;
  std::function<Vector(const RowBlock&, const Vector&)> residuals;
};

class CustomModel : public CostModel {
 public:
  CustomModel(SeriesData data, CustomFunctions functions);

  std::string name() const override { return fn_.name; }
  Index size() const override { return data_.rows(); }
  Index param_dim() const override { return fn_.param_dim; }
  double default_vanilla() const override;

  bool has_exact_cost() const override;
  double exact_cost(Index begin, Index end) const override;
  SegmentFit fit(Index begin, Index end) const override;

  bool has_loss() const override { return static_cast<bool>(fn_.loss); }
  double point_loss(Index begin, Index i, const Vector& theta) const override;
  double segment_loss(Index begin, Index end, const Vector& theta) const override;

  bool has_derivatives() const override { return fn_.gradient && fn_.hessian; }
  Vector point_gradient(Index begin, Index i, const Vector& theta) const override;
  Matrix point_hessian(Index begin, Index i, const Vector& theta) const override;
  Vector segment_gradient(Index begin, Index end, const Vector& theta) const override;
  Matrix segment_hessian(Index begin, Index end, const Vector& theta) const override;

  Vector residuals(Index begin, Index end, const Vector& theta) const override;

 private:
  RowBlock rows(Index begin, Index end) const { return data_.values().middleRows(begin, end - begin); }
  SeriesData data_;
  CustomFunctions fn_;
};

}  // namespace seqcpd
