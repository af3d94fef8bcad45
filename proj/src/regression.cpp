#include "seqcpd/regression.hpp"

#include "seqcpd/linalg.hpp"
#include "seqcpd/variance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace seqcpd {

namespace {

constexpr double kPoissonBound = 20.0;

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

struct GramBlocks {
  Matrix gram;
  Vector xty;
  double yy;
};

GramBlocks gram_blocks(const SeriesData& data, Index begin, Index end) {
  const Matrix q = data.segment_cross(begin, end);
  const Index d = q.rows() - 1;
  return {q.bottomRightCorner(d, d), q.col(0).tail(d), q(0, 0)};
}

double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))); }

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double variance_floor(const Vector& y) { return 1e-12 * std::max(y.cwiseAbs2().mean(), 1e-300); }

}  // namespace

LinearModel::LinearModel(SeriesData labeled, std::optional<double> sigma2) : data_(std::move(labeled)) {
  if (data_.role() != DataRole::labeled) throw InvalidConfig("lm needs labeled data (response in column 0)");
  d_ = data_.cols() - 1;
  const double est = sigma2 ? *sigma2 : grice_lm(data_, default_grice_window(d_));
  if (!(est >= 0.0)) throw InvalidConfig("noise variance must be nonnegative");
  sigma2_ = std::max(est, variance_floor(data_.values().col(0)));
}

void LinearModel::set_lag_info(std::string name, Index order, Index offset) {
  name_ = std::move(name);
  order_ = order;
  offset_ = offset;
}

double LinearModel::exact_cost(Index begin, Index end) const {
  const double n = static_cast<double>(end - begin);
  const GramBlocks g = gram_blocks(data_, begin, end);
  auto theta = solve_spd(g.gram, g.xty);
  if (!theta) return kInf;
  const double rss = std::max(0.0, g.yy - g.xty.dot(*theta));
  return 0.5 * n * std::log(2.0 * std::numbers::pi * sigma2_) + rss / (2.0 * sigma2_);
}

SegmentFit LinearModel::fit(Index begin, Index end) const {
  const GramBlocks g = gram_blocks(data_, begin, end);
  auto theta = solve_spd(g.gram, g.xty);
  if (!theta) {
    Vector pinv = g.gram.completeOrthogonalDecomposition().solve(g.xty);
    return {pinv, exact_cost(begin, end)};
  }
  return {*theta, exact_cost(begin, end)};
}

double LinearModel::point_loss(Index, Index i, const Vector& theta) const {
  const auto row = data_.values().row(i);
  const double r = row(0) - row.tail(d_).dot(theta);
  return 0.5 * std::log(2.0 * std::numbers::pi * sigma2_) + r * r / (2.0 * sigma2_);
}

double LinearModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  const double n = static_cast<double>(end - begin);
  const GramBlocks g = gram_blocks(data_, begin, end);
  const double rss = std::max(0.0, g.yy - 2.0 * g.xty.dot(theta) + theta.dot(g.gram * theta));
  return 0.5 * n * std::log(2.0 * std::numbers::pi * sigma2_) + rss / (2.0 * sigma2_);
}

Vector LinearModel::point_gradient(Index, Index i, const Vector& theta) const {
  const auto row = data_.values().row(i);
  const Vector x = row.tail(d_).transpose();
  return -(row(0) - x.dot(theta)) / sigma2_ * x;
}

Matrix LinearModel::point_hessian(Index, Index i, const Vector&) const {
  const Vector x = data_.values().row(i).tail(d_).transpose();
  return x * x.transpose() / sigma2_;
}

bool LinearModel::point_hessian_rank_one(Index, Index i, const Vector&, double& weight, Vector& u) const {
  u = data_.values().row(i).tail(d_).transpose();
  weight = 1.0 / sigma2_;
  return true;
}

Matrix LinearModel::segment_hessian(Index begin, Index end, const Vector&) const {
  return gram_blocks(data_, begin, end).gram / sigma2_;
}

Vector LinearModel::residuals(Index begin, Index end, const Vector& theta) const {
  const auto rows = data_.values().middleRows(begin, end - begin);
  return rows.col(0) - rows.rightCols(d_) * theta;
}

double glm_loss(double y, const Vector& x, const Vector& theta, GlmLink link) {
  const double eta = x.dot(theta);
  if (link == GlmLink::binomial) return softplus(eta) - y * eta;
  return std::exp(eta) - y * eta + std::lgamma(y + 1.0);
}

Vector glm_gradient(double y, const Vector& x, const Vector& theta, GlmLink link) {
  const double eta = x.dot(theta);
  const double mu = link == GlmLink::binomial ? sigmoid(eta) : std::exp(eta);
  return (mu - y) * x;
}

double glm_hessian_weight(const Vector& x, const Vector& theta, GlmLink link) {
  const double eta = x.dot(theta);
  if (link == GlmLink::binomial) {
    const double p = sigmoid(eta);
    return p * (1.0 - p);
  }
  return std::exp(eta);
}

Matrix glm_hessian(double, const Vector& x, const Vector& theta, GlmLink link) {
  return glm_hessian_weight(x, theta, link) * x * x.transpose();
}

GlmModel::GlmModel(SeriesData labeled, GlmLink link) : data_(std::move(labeled)), link_(link) {
  if (data_.role() != DataRole::labeled) throw InvalidConfig(name() + " needs labeled data (response in column 0)");
  const Vector y = data_.values().col(0);
  for (Index i = 0; i < y.size(); ++i) {
    const double v = y(i);
    if (link_ == GlmLink::binomial && (v < 0.0 || v > 1.0))
      throw DomainError("binomial response must lie in [0, 1]; row " + std::to_string(i + 1) + " has " +
                        std::to_string(v));
    if (link_ == GlmLink::poisson && (v < 0.0 || v != std::floor(v)))
      throw DomainError("poisson response must be a nonnegative integer; row " + std::to_string(i + 1) + " has " +
                        std::to_string(v));
  }
}

Vector GlmModel::default_lower() const {
  return Vector::Constant(param_dim(), link_ == GlmLink::poisson ? -kPoissonBound : -kInf);
}

Vector GlmModel::default_upper() const {
  return Vector::Constant(param_dim(), link_ == GlmLink::poisson ? kPoissonBound : kInf);
}

double GlmModel::point_loss(Index, Index i, const Vector& theta) const {
  const auto row = data_.values().row(i);
  return glm_loss(row(0), row.tail(param_dim()).transpose(), theta, link_);
}

double GlmModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  const auto rows = data_.values().middleRows(begin, end - begin);
  const Vector eta = rows.rightCols(param_dim()) * theta;
  const auto y = rows.col(0);
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) {
    if (link_ == GlmLink::binomial)
      total += softplus(eta(i)) - y(i) * eta(i);
    else
      total += std::exp(eta(i)) - y(i) * eta(i) + std::lgamma(y(i) + 1.0);
  }
  return total;
}

Vector GlmModel::point_gradient(Index, Index i, const Vector& theta) const {
  const auto row = data_.values().row(i);
  return glm_gradient(row(0), row.tail(param_dim()).transpose(), theta, link_);
}

Matrix GlmModel::point_hessian(Index, Index i, const Vector& theta) const {
  const auto row = data_.values().row(i);
  return glm_hessian(row(0), row.tail(param_dim()).transpose(), theta, link_);
}

bool GlmModel::point_hessian_rank_one(Index, Index i, const Vector& theta, double& weight, Vector& u) const {
  u = data_.values().row(i).tail(param_dim()).transpose();
  weight = glm_hessian_weight(u, theta, link_);
  return true;
}

Vector GlmModel::segment_gradient(Index begin, Index end, const Vector& theta) const {
  const auto rows = data_.values().middleRows(begin, end - begin);
  const auto x = rows.rightCols(param_dim());
  Vector eta = x * theta;
  for (Index i = 0; i < eta.size(); ++i)
    eta(i) = (link_ == GlmLink::binomial ? sigmoid(eta(i)) : std::exp(eta(i))) - rows(i, 0);
  return x.transpose() * eta;
}

Matrix GlmModel::segment_hessian(Index begin, Index end, const Vector& theta) const {
  const auto rows = data_.values().middleRows(begin, end - begin);
  const Matrix x = rows.rightCols(param_dim());
  Vector w = x * theta;
  for (Index i = 0; i < w.size(); ++i) {
    if (link_ == GlmLink::binomial) {
      const double p = sigmoid(w(i));
      w(i) = p * (1.0 - p);
    } else {
      w(i) = std::exp(w(i));
    }
  }
  return x.transpose() * w.asDiagonal() * x;
}

Vector GlmModel::residuals(Index begin, Index end, const Vector& theta) const {
  const auto rows = data_.values().middleRows(begin, end - begin);
  Vector mu = rows.rightCols(param_dim()) * theta;
  for (Index i = 0; i < mu.size(); ++i) mu(i) = link_ == GlmLink::binomial ? sigmoid(mu(i)) : std::exp(mu(i));
  return rows.col(0) - mu;
}

Vector soft_threshold(const Vector& v, const Vector& threshold) {
  Vector out(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    const double a = std::abs(v(j)) - threshold(j);
    out(j) = a > 0.0 ? std::copysign(a, v(j)) : 0.0;
  }
  return out;
}

double lasso_lambda(double sigma_hat, Index d, Index n) {
  return sigma_hat * std::sqrt(2.0 * std::log(static_cast<double>(d)) / static_cast<double>(n));
}

double lasso_pruning_c0(double sigma_hat, Index d, double theta_l1_bound) {
  return -1.3 * sigma_hat * std::sqrt(2.0 * std::log(static_cast<double>(d))) * theta_l1_bound;
}

namespace {

double lasso_objective(const Matrix& gram, const Vector& xty, double yy, double lambda, const Vector& theta) {
  const double rss = std::max(0.0, yy - 2.0 * xty.dot(theta) + theta.dot(gram * theta));
  return 0.5 * rss + lambda * theta.lpNorm<1>();
}

double lasso_gap(const Matrix& gram, const Vector& xty, double yy, double lambda, const Vector& theta,
                 double primal) {
  const Vector corr = xty - gram * theta;
  const double rr = std::max(0.0, yy - 2.0 * xty.dot(theta) + theta.dot(gram * theta));
  const double yr = yy - xty.dot(theta);
  const double top = corr.lpNorm<Eigen::Infinity>();
  const double s = top > lambda ? lambda / top : 1.0;
  const double dual = s * yr - 0.5 * s * s * rr;
  return primal - dual;
}

}  // namespace

LassoSolution lasso_solve(const Matrix& gram, const Vector& xty, double yy, double lambda, const Vector* warm) {
  const Index d = gram.rows();
  LassoSolution sol;
  if (lambda <= 0.0) {
    auto theta = solve_spd(gram, xty);
    sol.theta = theta ? *theta : Vector(gram.completeOrthogonalDecomposition().solve(xty));
    sol.objective = lasso_objective(gram, xty, yy, 0.0, sol.theta);
    return sol;
  }

  Vector theta = Vector::Zero(d);
  double best = lasso_objective(gram, xty, yy, lambda, theta);
  auto consider = [&](const Vector& cand) {
    const double obj = lasso_objective(gram, xty, yy, lambda, cand);
    if (obj < best) {
      best = obj;
      theta = cand;
    }
  };
  if (warm && warm->size() == d) consider(*warm);

  // Active-set Newton start.
  auto full = spd_factor(gram);
  Vector cur = theta;
  if (full) {
    cur = full->solve(xty);
    consider(cur);
  }
  const Vector diag = gram.diagonal();
  std::vector<int> signs(static_cast<std::size_t>(d), 2);
  for (int it = 0; it < 50; ++it) {
    const Vector corr = xty - gram * cur;
    std::vector<int> next(static_cast<std::size_t>(d), 0);
    std::vector<Index> active;
    for (Index j = 0; j < d; ++j) {
      if (diag(j) <= 0.0) continue;
      const double z = cur(j) + corr(j) / diag(j);
      const double thr = lambda / diag(j);
      if (z > thr) next[static_cast<std::size_t>(j)] = 1;
      if (z < -thr) next[static_cast<std::size_t>(j)] = -1;
      if (next[static_cast<std::size_t>(j)] != 0) active.push_back(j);
    }
    if (next == signs) break;
    signs = next;
    Vector cand = Vector::Zero(d);
    if (!active.empty()) {
      const Index k = static_cast<Index>(active.size());
      Vector rhs(k);
      for (Index a = 0; a < k; ++a) rhs(a) = xty(active[a]) - lambda * signs[static_cast<std::size_t>(active[a])];
      std::optional<Vector> sub;
      if (k == d && full) {
        sub = full->solve(rhs);
      } else {
        Matrix g(k, k);
        for (Index a = 0; a < k; ++a)
          for (Index b = 0; b < k; ++b) g(a, b) = gram(active[a], active[b]);
        sub = solve_spd(g, rhs);
      }
      if (!sub) break;
      for (Index a = 0; a < k; ++a) cand(active[a]) = (*sub)(a);
    }
    consider(cand);
    cur = cand;
  }

  // Coordinate descent polish with duality-gap stopping.
  Vector g_theta = gram * theta;
  double primal = lasso_objective(gram, xty, yy, lambda, theta);
  double gap = lasso_gap(gram, xty, yy, lambda, theta, primal);
  int sweeps = 0;
  while (gap > 1e-8 * std::max(1.0, std::abs(primal)) && sweeps < 10000) {
    for (Index j = 0; j < d; ++j) {
      if (diag(j) <= 0.0) continue;
      const double rho = xty(j) - g_theta(j) + diag(j) * theta(j);
      const double a = std::abs(rho) - lambda;
      const double updated = a > 0.0 ? std::copysign(a, rho) / diag(j) : 0.0;
      const double delta = updated - theta(j);
      if (delta != 0.0) {
        g_theta += gram.col(j) * delta;
        theta(j) = updated;
      }
    }
    ++sweeps;
    primal = lasso_objective(gram, xty, yy, lambda, theta);
    gap = lasso_gap(gram, xty, yy, lambda, theta, primal);
  }
  sol.theta = theta;
  sol.objective = primal;
  sol.gap = gap;
  sol.sweeps = sweeps;
  return sol;
}

LassoModel::LassoModel(SeriesData labeled, std::optional<double> sigma_hat, double theta_l1_bound)
    : data_(std::move(labeled)), bound_(theta_l1_bound) {
  if (data_.role() != DataRole::labeled) throw InvalidConfig("lasso needs labeled data (response in column 0)");
  if (!(theta_l1_bound >= 0.0)) throw InvalidConfig("--theta-l1-bound must be nonnegative");
  d_ = data_.cols() - 1;
  if (sigma_hat) {
    sigma_ = *sigma_hat;
  } else {
    sigma_ = std::sqrt(std::max(grice_lm(data_, default_grice_window(d_)), variance_floor(data_.values().col(0))));
  }
}

double LassoModel::family_pruning_base() const { return lasso_pruning_c0(sigma_, d_, bound_); }

double LassoModel::exact_cost(Index begin, Index end) const { return fit(begin, end).cost; }

SegmentFit LassoModel::fit(Index begin, Index end) const {
  const GramBlocks g = gram_blocks(data_, begin, end);
  LassoSolution s = lasso_solve(g.gram, g.xty, g.yy, lambda(end - begin));
  return {s.theta, s.objective};
}

double LassoModel::point_loss(Index, Index i, const Vector& theta) const {
  const auto row = data_.values().row(i);
  const double r = row(0) - row.tail(d_).dot(theta);
  return 0.5 * r * r;
}

double LassoModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  const GramBlocks g = gram_blocks(data_, begin, end);
  return 0.5 * std::max(0.0, g.yy - 2.0 * g.xty.dot(theta) + theta.dot(g.gram * theta));
}

double LassoModel::segment_penalty(Index begin, Index end, const Vector& theta) const {
  return lambda(end - begin) * theta.lpNorm<1>();
}

Vector LassoModel::point_gradient(Index, Index i, const Vector& theta) const {
  const auto row = data_.values().row(i);
  const Vector x = row.tail(d_).transpose();
  return -(row(0) - x.dot(theta)) * x;
}

Matrix LassoModel::point_hessian(Index, Index i, const Vector&) const {
  const Vector x = data_.values().row(i).tail(d_).transpose();
  return x * x.transpose();
}

bool LassoModel::point_hessian_rank_one(Index, Index i, const Vector&, double& weight, Vector& u) const {
  u = data_.values().row(i).tail(d_).transpose();
  weight = 1.0;
  return true;
}

Matrix LassoModel::segment_hessian(Index begin, Index end, const Vector&) const {
  return gram_blocks(data_, begin, end).gram;
}

void LassoModel::proximal(Index begin, Index end, const Vector& precond_diag, Vector& theta) const {
  const double lam = lambda(end - begin);
  theta = soft_threshold(theta, Vector(lam * precond_diag.cwiseInverse()));
}

Vector LassoModel::residuals(Index begin, Index end, const Vector& theta) const {
  const auto rows = data_.values().middleRows(begin, end - begin);
  return rows.col(0) - rows.rightCols(d_) * theta;
}

}  // namespace seqcpd
