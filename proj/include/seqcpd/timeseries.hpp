#pragma once

#include "seqcpd/cost_model.hpp"
#include "seqcpd/regression.hpp"
#include "seqcpd/series.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace seqcpd {

/// Rows [x_t, x_{t-1}, ..., x_{t-p}] for t = p..T-1 (each x_t may be a row vector).
Matrix lagged_design(const Matrix& series, Index p);

/// AR(p) as least squares on the lagged design; the first p rows are
/// consumed as regressors. sigma2 defaults to G-Rice on the lagged design.
std::unique_ptr<LinearModel> make_ar_model(const SeriesData& series, Index p,
                                           std::optional<double> sigma2 = std::nullopt);

/// Per-step quantities of the ARMA innovation recursion.
struct ArmaStep {
  double eps = 0.0;
  Vector c_phi;      // d eps / d phi, p
  Vector c_psi;      // d eps / d psi, q
  Matrix c_phipsi;   // d2 eps / d psi d phi, q x p
  Matrix c_psipsi;   // d2 eps / d psi d psi, q x q
};

/// Innovation recursion eps_t = x_t - phi' x_{t-1:t-p} - psi' eps_{t-1:t-q}
/// and its derivative recursions, zero-initialized at the segment start.
class ArmaState {
 public:
  ArmaState(const Vector& phi, const Vector& psi, bool second_order);

  /// Absorbs the next observation and returns the quantities at that step.
  const ArmaStep& absorb(double x);
  const ArmaStep& last() const { return cur_; }

 private:
  Vector phi_;
  Vector psi_;
  bool second_;
  std::vector<double> x_hist_;       // x_{t-1}, ..., x_{t-p}
  std::vector<ArmaStep> hist_;       // steps t-1, ..., t-q
  ArmaStep cur_;
};

enum class ArmaVariance { joint, fixed };

/// Conditional Gaussian QMLE of ARMA(p, q). In joint mode theta is
/// (phi, psi, sigma2); in fixed mode theta is (phi, psi) and sigma2 is held
/// at the value given at construction.
class ArmaModel : public CostModel {
 public:
  ArmaModel(const SeriesData& series, Index p, Index q, ArmaVariance mode = ArmaVariance::joint,
            std::optional<double> fixed_sigma2 = std::nullopt);

  std::string name() const override { return "arma"; }
  Index size() const override { return x_.size(); }
  Index param_dim() const override { return p_ + q_ + (mode_ == ArmaVariance::joint ? 1 : 0); }
  Index order() const override { return std::max(p_, q_); }

  bool has_exact_cost() const override { return true; }

  bool has_loss() const override { return true; }
  double point_loss(Index begin, Index i, const Vector& theta) const override;
  double segment_loss(Index begin, Index end, const Vector& theta) const override;

  bool has_derivatives() const override { return true; }
  Vector point_gradient(Index begin, Index i, const Vector& theta) const override;
  Matrix point_hessian(Index begin, Index i, const Vector& theta) const override;
  Vector segment_gradient(Index begin, Index end, const Vector& theta) const override;
  Matrix segment_hessian(Index begin, Index end, const Vector& theta) const override;
  /// Conditional Fisher information: the Hessian with eps^2 replaced by sigma2
  /// and terms linear in eps dropped.
  Matrix point_information(Index begin, Index i, const Vector& theta) const override;
  Matrix segment_information(Index begin, Index end, const Vector& theta) const override;

  Vector initial_guess(Index begin, Index end) const override;
  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  Index p() const { return p_; }
  Index q() const { return q_; }
  ArmaVariance mode() const { return mode_; }
  double fixed_sigma2() const { return sigma2_; }

  /// Loss, gradient and Hessian contributions of one step.
  double step_loss(const ArmaStep& s, const Vector& theta) const;
  Vector step_gradient(const ArmaStep& s, const Vector& theta) const;
  Matrix step_hessian(const ArmaStep& s, const Vector& theta) const;
  Matrix step_information(const ArmaStep& s, const Vector& theta) const;

 protected:
  Vector default_lower() const override;
  Vector default_upper() const override;

 private:
  ArmaState state_for(const Vector& theta, bool second) const;
  double sigma2_of(const Vector& theta) const;

  Vector x_;
  Index p_;
  Index q_;
  ArmaVariance mode_;
  double sigma2_ = 1.0;
};

/// Full-segment QMLE pieces on a univariate segment (joint mode layout).
double arma_loss(const Vector& segment, Index p, Index q, const Vector& theta);
Vector arma_gradient(const Vector& segment, Index p, Index q, const Vector& theta);
Matrix arma_hessian(const Vector& segment, Index p, Index q, const Vector& theta);

struct ArOrderChoice {
  Index order = 1;
  double sigma2 = 0.0;
};

/// Noise variance for the coefficient-change ARMA mode: picks the AR(p')
/// order minimizing ln sigma2 + p' ln T / T over 1..max_order (default
/// floor(10 log10 T)), with sigma2 from G-Rice on each AR(p') design.
ArOrderChoice arma_sigma2_for_coefficient_change(const Vector& series, std::optional<Index> max_order = std::nullopt);

/// VAR(p) by per-equation least squares with covariance from the
/// multi-response G-Rice estimator (window d p + 2).
class VarModel : public CostModel {
 public:
  VarModel(const SeriesData& series, Index p, std::optional<Matrix> sigma = std::nullopt);

  std::string name() const override { return "var"; }
  Index size() const override { return data_.rows(); }
  Index param_dim() const override { return d_ * d_ * p_; }
  Index order() const override { return p_; }
  Index time_offset() const override { return p_; }
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

  Vector residuals(Index begin, Index end, const Vector& theta) const override;

  const Matrix& sigma_hat() const { return sigma_; }

 private:
  SeriesData data_;  // [x_t | x_{t-1} ... x_{t-p}]
  Index d_;
  Index p_;
  Matrix sigma_;
  Matrix precision_;
  double log_det_ = 0.0;
};

}  // namespace seqcpd
