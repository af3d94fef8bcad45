#pragma once

#include "seqcpd/cost_model.hpp"
#include "seqcpd/series.hpp"

#include <optional>

namespace seqcpd {

/// Gaussian linear regression with noise variance fixed at the G-Rice estimate.
/// Column 0 of the data is the response.
class LinearModel : public CostModel {
 public:
  explicit LinearModel(SeriesData labeled, std::optional<double> sigma2 = std::nullopt);

  std::string name() const override { return name_; }
  Index size() const override { return data_.rows(); }
  Index param_dim() const override { return d_; }
  Index order() const override { return order_; }
  Index time_offset() const override { return offset_; }
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
  bool point_hessian_rank_one(Index begin, Index i, const Vector& theta, double& weight, Vector& u) const override;
  Matrix segment_hessian(Index begin, Index end, const Vector& theta) const override;

  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  double sigma2_hat() const { return sigma2_; }
  /// Marks the model as AR(p) on a lagged design with `offset` consumed rows.
  void set_lag_info(std::string name, Index order, Index offset);

 private:
  SeriesData data_;
  Index d_;
  double sigma2_;
  std::string name_ = "lm";
  Index order_ = 0;
  Index offset_ = 0;
};

enum class GlmLink { binomial, poisson };

double glm_loss(double y, const Vector& x, const Vector& theta, GlmLink link);
Vector glm_gradient(double y, const Vector& x, const Vector& theta, GlmLink link);
Matrix glm_hessian(double y, const Vector& x, const Vector& theta, GlmLink link);
/// Weight w with Hessian = w x x^T.
double glm_hessian_weight(const Vector& x, const Vector& theta, GlmLink link);

class GlmModel : public CostModel {
 public:
  GlmModel(SeriesData labeled, GlmLink link);

  std::string name() const override { return link_ == GlmLink::binomial ? "binomial" : "poisson"; }
  Index size() const override { return data_.rows(); }
  Index param_dim() const override { return data_.cols() - 1; }

  bool has_exact_cost() const override { return true; }

  bool has_loss() const override { return true; }
  double point_loss(Index begin, Index i, const Vector& theta) const override;
  double segment_loss(Index begin, Index end, const Vector& theta) const override;

  bool has_derivatives() const override { return true; }
  Vector point_gradient(Index begin, Index i, const Vector& theta) const override;
  Matrix point_hessian(Index begin, Index i, const Vector& theta) const override;
  bool point_hessian_rank_one(Index begin, Index i, const Vector& theta, double& weight, Vector& u) const override;
  Vector segment_gradient(Index begin, Index end, const Vector& theta) const override;
  Matrix segment_hessian(Index begin, Index end, const Vector& theta) const override;

  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  /// Poisson coefficients are confined to [-20, 20] so exp(x^T theta) stays finite.
  Vector default_lower() const override;
  Vector default_upper() const override;

  GlmLink link() const { return link_; }

 private:
  SeriesData data_;
  GlmLink link_;
};

struct LassoSolution {
  Vector theta;
  double objective = 0.0;
  double gap = 0.0;
  int sweeps = 0;
};

/// Minimizes 0.5 theta^T G theta - b^T theta + 0.5 yy + lambda |theta|_1,
/// i.e. 0.5 |y - X theta|^2 + lambda |theta|_1 in Gram form. An active-set
/// Newton pass provides the start; cyclic coordinate descent then runs until
/// the duality gap is below 1e-8 (relative to max(1, objective)) or 1e4 sweeps.
LassoSolution lasso_solve(const Matrix& gram, const Vector& xty, double yy, double lambda,
                          const Vector* warm = nullptr);

double lasso_lambda(double sigma_hat, Index d, Index n);
double lasso_pruning_c0(double sigma_hat, Index d, double theta_l1_bound);
/// Componentwise sign(v) * max(|v| - threshold, 0).
Vector soft_threshold(const Vector& v, const Vector& threshold);

class LassoModel : public CostModel {
 public:
  LassoModel(SeriesData labeled, std::optional<double> sigma_hat = std::nullopt, double theta_l1_bound = 50.0);

  std::string name() const override { return "lasso"; }
  Index size() const override { return data_.rows(); }
  Index param_dim() const override { return d_; }
  double family_pruning_base() const override;

  bool has_exact_cost() const override { return true; }
  double exact_cost(Index begin, Index end) const override;
  SegmentFit fit(Index begin, Index end) const override;

  bool has_loss() const override { return true; }
  double point_loss(Index begin, Index i, const Vector& theta) const override;
  double segment_loss(Index begin, Index end, const Vector& theta) const override;
  double segment_penalty(Index begin, Index end, const Vector& theta) const override;

  bool has_derivatives() const override { return true; }
  Vector point_gradient(Index begin, Index i, const Vector& theta) const override;
  Matrix point_hessian(Index begin, Index i, const Vector& theta) const override;
  bool point_hessian_rank_one(Index begin, Index i, const Vector& theta, double& weight, Vector& u) const override;
  Matrix segment_hessian(Index begin, Index end, const Vector& theta) const override;
  bool has_proximal() const override { return true; }
  void proximal(Index begin, Index end, const Vector& precond_diag, Vector& theta) const override;

  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  double sigma_hat() const { return sigma_; }
  double lambda(Index n) const { return lasso_lambda(sigma_, d_, n); }

 private:
  SeriesData data_;
  Index d_;
  double sigma_;
  double bound_;
};

}  // namespace seqcpd
