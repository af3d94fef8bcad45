#pragma once

#include "seqcpd/types.hpp"

#include <string>

namespace seqcpd {

struct SegmentFit {
  Vector theta;
  double cost = kInf;
};

/// Family contract bound to one data set.
///
/// Segments are half-open row ranges [begin, end) of the model's own rows
/// (for AR/VAR these are the lagged rows, see time_offset()). Pointwise
/// functions take the segment start as well as the row so that models with
/// recursive state (ARMA) can rebuild it; iid models ignore `begin`.
class CostModel {
 public:
  CostModel() = default;
  CostModel(const CostModel&) = default;
  CostModel& operator=(const CostModel&) = default;
  virtual ~CostModel() = default;

  virtual std::string name() const = 0;
  virtual Index size() const = 0;
  virtual Index param_dim() const = 0;
  virtual Index order() const { return 0; }
  virtual Index min_segment_length() const;

  /// Rows dropped in front of the model's rows (lag consumption).
  virtual Index time_offset() const { return 0; }
  /// Default fraction of T below which the exact cost is used.
  virtual double default_vanilla() const { return 0.0; }
  /// Family part of the pruning constant c0.
  virtual double family_pruning_base() const { return 0.0; }

  virtual bool has_exact_cost() const { return false; }
  /// Minimized cost over [begin, end); +inf for degenerate segments.
  virtual double exact_cost(Index begin, Index end) const;
  /// Minimizer and minimum. The default runs exact_minimize.
  virtual SegmentFit fit(Index begin, Index end) const;

  virtual bool has_loss() const { return false; }
  virtual double point_loss(Index begin, Index i, const Vector& theta) const;
  virtual double segment_loss(Index begin, Index end, const Vector& theta) const;
  /// Segment-length dependent penalty on theta (lasso); zero otherwise.
  virtual double segment_penalty(Index /*begin*/, Index /*end*/, const Vector& /*theta*/) const { return 0.0; }

  virtual bool has_derivatives() const { return false; }
  bool supports_segd() const { return has_loss() && has_derivatives(); }
  virtual Vector point_gradient(Index begin, Index i, const Vector& theta) const;
  virtual Matrix point_hessian(Index begin, Index i, const Vector& theta) const;
  /// When the point Hessian is weight * u u^T, fills both and returns true.
  virtual bool point_hessian_rank_one(Index /*begin*/, Index /*i*/, const Vector& /*theta*/, double& /*weight*/,
                                      Vector& /*u*/) const {
    return false;
  }
  virtual Vector segment_gradient(Index begin, Index end, const Vector& theta) const;
  virtual Matrix segment_hessian(Index begin, Index end, const Vector& theta) const;
  /// Curvature fed to the SeGD preconditioner; the Hessian unless a model
  /// substitutes its (positive semidefinite) Fisher information.
  virtual Matrix point_information(Index begin, Index i, const Vector& theta) const {
    return point_hessian(begin, i, theta);
  }
  virtual Matrix segment_information(Index begin, Index end, const Vector& theta) const {
    return segment_hessian(begin, end, theta);
  }
  /// Proximal correction after a step over [begin, end) with preconditioner diagonal.
  virtual bool has_proximal() const { return false; }
  virtual void proximal(Index /*begin*/, Index /*end*/, const Vector& /*precond_diag*/, Vector& /*theta*/) const {}

  /// Starting point for exact_minimize.
  virtual Vector initial_guess(Index begin, Index end) const;

  /// One scalar residual per row (signed for univariate fits, a Mahalanobis
  /// norm for multivariate ones).
  virtual Vector residuals(Index begin, Index end, const Vector& theta) const;

  Vector lower() const;
  Vector upper() const;
  /// Overrides the family's default box; both vectors must have param_dim entries.
  void set_bounds(const Vector& lower, const Vector& upper);

 protected:
  virtual Vector default_lower() const;
  virtual Vector default_upper() const;

 private:
  Vector lower_;
  Vector upper_;
  bool custom_bounds_ = false;
};

}  // namespace seqcpd
