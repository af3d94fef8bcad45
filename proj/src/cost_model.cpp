#include "seqcpd/cost_model.hpp"

#include "seqcpd/oracle.hpp"

#include <algorithm>

namespace seqcpd {

Index CostModel::min_segment_length() const { return std::max(param_dim() + 1, order() + 1); }

double CostModel::exact_cost(Index begin, Index end) const {
  if (!has_exact_cost()) throw UnsupportedFamily(name() + " has no exact cost");
  return fit(begin, end).cost;
}

SegmentFit CostModel::fit(Index begin, Index end) const {
  if (!has_loss() || !has_derivatives()) throw UnsupportedFamily(name() + " cannot be minimized numerically");
  MinimizeResult r = exact_minimize(*this, begin, end);
  return {r.theta, r.cost};
}

double CostModel::point_loss(Index, Index, const Vector&) const {
  throw UnsupportedFamily(name() + " has no pointwise loss");
}

double CostModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  double total = 0.0;
  for (Index i = begin; i < end; ++i) total += point_loss(begin, i, theta);
  return total;
}

Vector CostModel::point_gradient(Index, Index, const Vector&) const {
  throw UnsupportedFamily(name() + " has no gradient");
}

Matrix CostModel::point_hessian(Index, Index, const Vector&) const {
  throw UnsupportedFamily(name() + " has no Hessian");
}

Vector CostModel::segment_gradient(Index begin, Index end, const Vector& theta) const {
  Vector g = Vector::Zero(param_dim());
  for (Index i = begin; i < end; ++i) g += point_gradient(begin, i, theta);
  return g;
}

Matrix CostModel::segment_hessian(Index begin, Index end, const Vector& theta) const {
  Matrix h = Matrix::Zero(param_dim(), param_dim());
  for (Index i = begin; i < end; ++i) h += point_hessian(begin, i, theta);
  return h;
}

Vector CostModel::initial_guess(Index, Index) const { return Vector::Zero(param_dim()); }

Vector CostModel::residuals(Index begin, Index end, const Vector&) const {
  return Vector::Zero(end - begin);
}

Vector CostModel::default_lower() const { return Vector::Constant(param_dim(), -kInf); }
Vector CostModel::default_upper() const { return Vector::Constant(param_dim(), kInf); }

Vector CostModel::lower() const { return custom_bounds_ ? lower_ : default_lower(); }
Vector CostModel::upper() const { return custom_bounds_ ? upper_ : default_upper(); }

void CostModel::set_bounds(const Vector& lower, const Vector& upper) {
  if (lower.size() != param_dim() || upper.size() != param_dim())
    throw InvalidConfig("--lower/--upper need " + std::to_string(param_dim()) + " entries for " + name());
  if ((lower.array() > upper.array()).any()) throw InvalidConfig("--lower must not exceed --upper");
  lower_ = lower;
  upper_ = upper;
  custom_bounds_ = true;
}

}  // namespace seqcpd
