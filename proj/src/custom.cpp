#include "seqcpd/custom.hpp"

#include "seqcpd/oracle.hpp"

namespace seqcpd {

CustomModel::CustomModel(SeriesData data, CustomFunctions functions)
    : data_(std::move(data)), fn_(std::move(functions)) {
  if (fn_.param_dim < 1) throw InvalidConfig("custom model needs a positive parameter dimension");
  if (!fn_.cost && !fn_.loss) throw InvalidConfig("custom model needs a cost or a loss function");
  if (static_cast<bool>(fn_.gradient) != static_cast<bool>(fn_.hessian))
    throw InvalidConfig("custom model needs both gradient and hessian, or neither");
}

double CustomModel::default_vanilla() const { return supports_segd() ? fn_.default_vanilla : 1.0; }

bool CustomModel::has_exact_cost() const { return fn_.cost || supports_segd(); }

double CustomModel::exact_cost(Index begin, Index end) const {
  if (fn_.cost) return fn_.cost(rows(begin, end));
  return fit(begin, end).cost;
}

SegmentFit CustomModel::fit(Index begin, Index end) const {
  if (supports_segd()) {
    MinimizeResult r = exact_minimize(*this, begin, end);
    return {r.theta, fn_.cost ? fn_.cost(rows(begin, end)) : r.cost};
  }
  if (!fn_.cost) throw UnsupportedFamily(name() + " has neither a cost nor derivatives");
  return {Vector(), fn_.cost(rows(begin, end))};
}

double CustomModel::point_loss(Index, Index i, const Vector& theta) const {
  if (!fn_.loss) return CostModel::point_loss(i, i, theta);
  return fn_.loss(rows(i, i + 1), theta);
}

double CustomModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  if (!fn_.loss) return CostModel::segment_loss(begin, end, theta);
  return fn_.loss(rows(begin, end), theta);
}

Vector CustomModel::point_gradient(Index, Index i, const Vector& theta) const {
  if (!fn_.gradient) return CostModel::point_gradient(i, i, theta);
  return fn_.gradient(rows(i, i + 1), theta);
}

Matrix CustomModel::point_hessian(Index, Index i, const Vector& theta) const {
  if (!fn_.hessian) return CostModel::point_hessian(i, i, theta);
  return fn_.hessian(rows(i, i + 1), theta);
}

Vector CustomModel::segment_gradient(Index begin, Index end, const Vector& theta) const {
  if (!fn_.gradient) return CostModel::segment_gradient(begin, end, theta);
  return fn_.gradient(rows(begin, end), theta);
}

Matrix CustomModel::segment_hessian(Index begin, Index end, const Vector& theta) const {
  if (!fn_.hessian) return CostModel::segment_hessian(begin, end, theta);
  return fn_.hessian(rows(begin, end), theta);
}

Vector CustomModel::residuals(Index begin, Index end, const Vector& theta) const {
  if (fn_.residuals) return fn_.residuals(rows(begin, end), theta);
  if (data_.role() == DataRole::labeled && theta.size() == data_.cols() - 1) {
    const RowBlock r = rows(begin, end);
    return r.col(0) - r.rightCols(theta.size()) * theta;
  }
  return Vector::Zero(end - begin);
}

}  // namespace seqcpd
