#include "seqcpd/timeseries.hpp"

#include "seqcpd/linalg.hpp"
#include "seqcpd/variance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seqcpd {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

}  // namespace

Matrix lagged_design(const Matrix& series, Index p) {
  const Index t = series.rows();
  const Index d = series.cols();
  if (p < 1) throw InvalidConfig("--order must be at least 1");
  if (t <= p + 1) throw InvalidConfig("series too short for the requested order");
  Matrix out(t - p, d * (p + 1));
  for (Index i = p; i < t; ++i)
    for (Index lag = 0; lag <= p; ++lag) out.block(i - p, lag * d, 1, d) = series.row(i - lag);
  return out;
}

std::unique_ptr<LinearModel> make_ar_model(const SeriesData& series, Index p, std::optional<double> sigma2) {
  if (series.cols() != 1) throw InvalidConfig("ar needs a univariate series");
  SeriesData lagged(lagged_design(series.values(), p), DataRole::labeled);
  auto model = std::make_unique<LinearModel>(std::move(lagged), sigma2);
  model->set_lag_info("ar", p, p);
  return model;
}

ArmaState::ArmaState(const Vector& phi, const Vector& psi, bool second_order)
    : phi_(phi), psi_(psi), second_(second_order) {
  const Index p = phi.size();
  const Index q = psi.size();
  x_hist_.assign(static_cast<std::size_t>(p), 0.0);
  ArmaStep zero;
  zero.c_phi = Vector::Zero(p);
  zero.c_psi = Vector::Zero(q);
  if (second_) {
    zero.c_phipsi = Matrix::Zero(q, p);
    zero.c_psipsi = Matrix::Zero(q, q);
  }
  hist_.assign(static_cast<std::size_t>(q), zero);
  cur_ = zero;
}

const ArmaStep& ArmaState::absorb(double x) {
  const Index p = phi_.size();
  const Index q = psi_.size();
  // hist_[0] holds step t-1 once the previous result has been pushed.
  if (q > 0) {
    std::rotate(hist_.rbegin(), hist_.rbegin() + 1, hist_.rend());
    hist_[0] = cur_;
  }
  ArmaStep& s = cur_;
  double eps = x;
  for (Index i = 0; i < p; ++i) {
    eps -= phi_(i) * x_hist_[static_cast<std::size_t>(i)];
    s.c_phi(i) = -x_hist_[static_cast<std::size_t>(i)];
  }
  for (Index j = 0; j < q; ++j) {
    const ArmaStep& h = hist_[static_cast<std::size_t>(j)];
    eps -= psi_(j) * h.eps;
    s.c_psi(j) = -h.eps;
  }
  for (Index j = 0; j < q; ++j) {
    const ArmaStep& h = hist_[static_cast<std::size_t>(j)];
    s.c_phi.noalias() -= psi_(j) * h.c_phi;
  }
  for (Index j = 0; j < q; ++j) s.c_psi.noalias() -= psi_(j) * hist_[static_cast<std::size_t>(j)].c_psi;
  if (second_) {
    for (Index m = 0; m < q; ++m) {
      const ArmaStep& hm = hist_[static_cast<std::size_t>(m)];
      s.c_phipsi.row(m) = -hm.c_phi.transpose();
      for (Index n = 0; n < q; ++n) s.c_psipsi(m, n) = -hm.c_psi(n) - hist_[static_cast<std::size_t>(n)].c_psi(m);
    }
    for (Index j = 0; j < q; ++j) {
      const ArmaStep& h = hist_[static_cast<std::size_t>(j)];
      s.c_phipsi.noalias() -= psi_(j) * h.c_phipsi;
      s.c_psipsi.noalias() -= psi_(j) * h.c_psipsi;
    }
  }
  s.eps = eps;
  if (p > 0) {
    std::rotate(x_hist_.rbegin(), x_hist_.rbegin() + 1, x_hist_.rend());
    x_hist_[0] = x;
  }
  return cur_;
}

ArmaModel::ArmaModel(const SeriesData& series, Index p, Index q, ArmaVariance mode, std::optional<double> fixed_sigma2)
    : p_(p), q_(q), mode_(mode) {
  if (series.cols() != 1) throw InvalidConfig("arma needs a univariate series");
  if (p < 0 || q < 0 || p + q == 0) throw InvalidConfig("--order for arma needs p,q with p + q >= 1");
  x_ = series.values().col(0);
  if (mode_ == ArmaVariance::fixed) {
    sigma2_ = fixed_sigma2 ? *fixed_sigma2 : arma_sigma2_for_coefficient_change(x_).sigma2;
    sigma2_ = std::max(sigma2_, 1e-12 * std::max(x_.cwiseAbs2().mean(), 1e-300));
  }
}

double ArmaModel::sigma2_of(const Vector& theta) const {
  return mode_ == ArmaVariance::joint ? theta(p_ + q_) : sigma2_;
}

ArmaState ArmaModel::state_for(const Vector& theta, bool second) const {
  return ArmaState(theta.head(p_), theta.segment(p_, q_), second);
}

double ArmaModel::step_loss(const ArmaStep& s, const Vector& theta) const {
  const double s2 = sigma2_of(theta);
  if (!(s2 > 0.0) || !std::isfinite(s.eps)) return kInf;
  return 0.5 * (kLog2Pi + std::log(s2)) + s.eps * s.eps / (2.0 * s2);
}

Vector ArmaModel::step_gradient(const ArmaStep& s, const Vector& theta) const {
  const double s2 = sigma2_of(theta);
  Vector g(param_dim());
  g.head(p_) = s.eps * s.c_phi / s2;
  g.segment(p_, q_) = s.eps * s.c_psi / s2;
  if (mode_ == ArmaVariance::joint) g(p_ + q_) = 1.0 / (2.0 * s2) - s.eps * s.eps / (2.0 * s2 * s2);
  return g;
}

Matrix ArmaModel::step_hessian(const ArmaStep& s, const Vector& theta) const {
  const double s2 = sigma2_of(theta);
  const Index k = param_dim();
  Matrix h = Matrix::Zero(k, k);
  h.topLeftCorner(p_, p_) = s.c_phi * s.c_phi.transpose() / s2;
  h.block(0, p_, p_, q_) = (s.c_phi * s.c_psi.transpose() + s.eps * s.c_phipsi.transpose()) / s2;
  h.block(p_, 0, q_, p_) = h.block(0, p_, p_, q_).transpose();
  h.block(p_, p_, q_, q_) = (s.c_psi * s.c_psi.transpose() + s.eps * s.c_psipsi) / s2;
  if (mode_ == ArmaVariance::joint) {
    const Index v = p_ + q_;
    const double s4 = s2 * s2;
    h.block(0, v, p_, 1) = -s.eps * s.c_phi / s4;
    h.block(p_, v, q_, 1) = -s.eps * s.c_psi / s4;
    h.block(v, 0, 1, v) = h.block(0, v, v, 1).transpose();
    h(v, v) = -1.0 / (2.0 * s4) + s.eps * s.eps / (s4 * s2);
  }
  return h;
}

Matrix ArmaModel::step_information(const ArmaStep& s, const Vector& theta) const {
  const double s2 = sigma2_of(theta);
  const Index k = param_dim();
  Matrix h = Matrix::Zero(k, k);
  Vector c(p_ + q_);
  c << s.c_phi, s.c_psi;
  h.topLeftCorner(p_ + q_, p_ + q_) = c * c.transpose() / s2;
  if (mode_ == ArmaVariance::joint) h(p_ + q_, p_ + q_) = 1.0 / (2.0 * s2 * s2);
  return h;
}

double ArmaModel::point_loss(Index begin, Index i, const Vector& theta) const {
  ArmaState st = state_for(theta, false);
  for (Index k = begin; k <= i; ++k) st.absorb(x_(k));
  return step_loss(st.last(), theta);
}

double ArmaModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  const double s2 = sigma2_of(theta);
  if (!(s2 > 0.0)) return kInf;
  ArmaState st = state_for(theta, false);
  double sq = 0.0;
  for (Index k = begin; k < end; ++k) {
    const double e = st.absorb(x_(k)).eps;
    sq += e * e;
  }
  if (!std::isfinite(sq)) return kInf;
  const double n = static_cast<double>(end - begin);
  return 0.5 * n * (kLog2Pi + std::log(s2)) + sq / (2.0 * s2);
}

Vector ArmaModel::point_gradient(Index begin, Index i, const Vector& theta) const {
  ArmaState st = state_for(theta, false);
  for (Index k = begin; k <= i; ++k) st.absorb(x_(k));
  return step_gradient(st.last(), theta);
}

Matrix ArmaModel::point_hessian(Index begin, Index i, const Vector& theta) const {
  ArmaState st = state_for(theta, true);
  for (Index k = begin; k <= i; ++k) st.absorb(x_(k));
  return step_hessian(st.last(), theta);
}

Vector ArmaModel::segment_gradient(Index begin, Index end, const Vector& theta) const {
  ArmaState st = state_for(theta, false);
  Vector g = Vector::Zero(param_dim());
  for (Index k = begin; k < end; ++k) g += step_gradient(st.absorb(x_(k)), theta);
  return g;
}

Matrix ArmaModel::segment_hessian(Index begin, Index end, const Vector& theta) const {
  ArmaState st = state_for(theta, true);
  Matrix h = Matrix::Zero(param_dim(), param_dim());
  for (Index k = begin; k < end; ++k) h += step_hessian(st.absorb(x_(k)), theta);
  return h;
}

Matrix ArmaModel::point_information(Index begin, Index i, const Vector& theta) const {
  ArmaState st = state_for(theta, false);
  for (Index k = begin; k <= i; ++k) st.absorb(x_(k));
  return step_information(st.last(), theta);
}

Matrix ArmaModel::segment_information(Index begin, Index end, const Vector& theta) const {
  ArmaState st = state_for(theta, false);
  Matrix h = Matrix::Zero(param_dim(), param_dim());
  for (Index k = begin; k < end; ++k) h += step_information(st.absorb(x_(k)), theta);
  return h;
}

Vector ArmaModel::initial_guess(Index begin, Index end) const {
  Vector theta = Vector::Zero(param_dim());
  if (mode_ == ArmaVariance::joint)
    theta(p_ + q_) = std::max(x_.segment(begin, end - begin).cwiseAbs2().mean(), 1e-8);
  project_box(theta, lower(), upper());
  return theta;
}

Vector ArmaModel::residuals(Index begin, Index end, const Vector& theta) const {
  ArmaState st = state_for(theta, false);
  Vector out(end - begin);
  for (Index k = begin; k < end; ++k) out(k - begin) = st.absorb(x_(k)).eps;
  return out;
}

Vector ArmaModel::default_lower() const {
  Vector v = Vector::Constant(param_dim(), -1.0);
  if (mode_ == ArmaVariance::joint) v(p_ + q_) = 1e-10;
  return v;
}

Vector ArmaModel::default_upper() const {
  Vector v = Vector::Constant(param_dim(), 1.0);
  if (mode_ == ArmaVariance::joint) v(p_ + q_) = kInf;
  return v;
}

namespace {

ArmaModel segment_model(const Vector& segment, Index p, Index q) {
  return ArmaModel(SeriesData(Matrix(segment), DataRole::timeseries), p, q, ArmaVariance::joint, std::nullopt);
}

}  // namespace

double arma_loss(const Vector& segment, Index p, Index q, const Vector& theta) {
  return segment_model(segment, p, q).segment_loss(0, segment.size(), theta);
}

Vector arma_gradient(const Vector& segment, Index p, Index q, const Vector& theta) {
  return segment_model(segment, p, q).segment_gradient(0, segment.size(), theta);
}

Matrix arma_hessian(const Vector& segment, Index p, Index q, const Vector& theta) {
  return segment_model(segment, p, q).segment_hessian(0, segment.size(), theta);
}

ArOrderChoice arma_sigma2_for_coefficient_change(const Vector& series, std::optional<Index> max_order) {
  const Index t = series.size();
  const double tt = static_cast<double>(t);
  Index top = max_order ? *max_order : static_cast<Index>(std::floor(10.0 * std::log10(tt)));
  top = std::max<Index>(1, std::min(top, (t - 1) / 10));
  ArOrderChoice best;
  double best_bic = kInf;
  bool found = false;
  for (Index order = 1; order <= top; ++order) {
    const Matrix design = lagged_design(series, order);
    double s2 = 0.0;
    try {
      s2 = grice_lm(design.rightCols(order), design.col(0), default_grice_window(order));
    } catch (const DegenerateSegment&) {
      continue;
    }
    const double bic = std::log(s2) + static_cast<double>(order) * std::log(tt) / tt;
    if (!found || bic < best_bic) {
      best_bic = bic;
      best = {order, s2};
      found = true;
    }
  }
  return best;
}

VarModel::VarModel(const SeriesData& series, Index p, std::optional<Matrix> sigma) : d_(series.cols()), p_(p) {
  const Matrix lagged = lagged_design(series.values(), p);
  data_ = SeriesData(lagged, DataRole::unlabeled);
  const Index dp = d_ * p_;
  sigma_ = sigma ? *sigma : grice_multi(lagged.rightCols(dp), lagged.leftCols(d_), dp + 2);
  if (sigma_.rows() != d_ || sigma_.cols() != d_) throw InvalidConfig("VAR covariance has the wrong shape");
  const double top = sigma_.diagonal().maxCoeff();
  double ridge = top > 0.0 ? 1e-10 * top : 1.0;
  auto llt = spd_factor(sigma_);
  while (!llt) {
    sigma_ += ridge * Matrix::Identity(d_, d_);
    ridge *= 10.0;
    llt = spd_factor(sigma_);
  }
  precision_ = llt->solve(Matrix::Identity(d_, d_));
  log_det_ = log_det(*llt);
}

double VarModel::exact_cost(Index begin, Index end) const {
  const Index dp = d_ * p_;
  const Matrix q = data_.segment_cross(begin, end);
  const Matrix zz = q.bottomRightCorner(dp, dp);
  const Matrix zy = q.bottomLeftCorner(dp, d_);
  auto llt = spd_factor(zz);
  if (!llt) return kInf;
  const Matrix b = llt->solve(zy);
  const Matrix resid = q.topLeftCorner(d_, d_) - zy.transpose() * b;
  const double quad = std::max(0.0, precision_.cwiseProduct(resid).sum());
  const double n = static_cast<double>(end - begin);
  return 0.5 * quad + 0.5 * n * (static_cast<double>(d_) * kLog2Pi + log_det_);
}

SegmentFit VarModel::fit(Index begin, Index end) const {
  const Index dp = d_ * p_;
  const Matrix q = data_.segment_cross(begin, end);
  const Matrix zz = q.bottomRightCorner(dp, dp);
  const Matrix zy = q.bottomLeftCorner(dp, d_);
  Matrix b = zz.completeOrthogonalDecomposition().solve(zy);
  return {Eigen::Map<Vector>(b.data(), b.size()), exact_cost(begin, end)};
}

double VarModel::point_loss(Index, Index i, const Vector& theta) const {
  const Index dp = d_ * p_;
  const Eigen::Map<const Matrix> b(theta.data(), dp, d_);
  const auto row = data_.values().row(i);
  const Vector r = row.head(d_).transpose() - b.transpose() * row.tail(dp).transpose();
  return 0.5 * r.dot(precision_ * r) + 0.5 * (static_cast<double>(d_) * kLog2Pi + log_det_);
}

double VarModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  const Index dp = d_ * p_;
  const Eigen::Map<const Matrix> b(theta.data(), dp, d_);
  const Matrix q = data_.segment_cross(begin, end);
  const Matrix zy = q.bottomLeftCorner(dp, d_);
  const Matrix resid =
      q.topLeftCorner(d_, d_) - zy.transpose() * b - b.transpose() * zy + b.transpose() * q.bottomRightCorner(dp, dp) * b;
  const double n = static_cast<double>(end - begin);
  return 0.5 * std::max(0.0, precision_.cwiseProduct(resid).sum()) +
         0.5 * n * (static_cast<double>(d_) * kLog2Pi + log_det_);
}

Vector VarModel::point_gradient(Index, Index i, const Vector& theta) const {
  const Index dp = d_ * p_;
  const Eigen::Map<const Matrix> b(theta.data(), dp, d_);
  const auto row = data_.values().row(i);
  const Vector z = row.tail(dp).transpose();
  const Vector r = row.head(d_).transpose() - b.transpose() * z;
  Matrix g = -z * (precision_ * r).transpose();
  return Eigen::Map<Vector>(g.data(), g.size());
}

Matrix VarModel::point_hessian(Index, Index i, const Vector&) const {
  const Index dp = d_ * p_;
  const Vector z = data_.values().row(i).tail(dp).transpose();
  const Matrix zz = z * z.transpose();
  Matrix h(dp * d_, dp * d_);
  for (Index a = 0; a < d_; ++a)
    for (Index c = 0; c < d_; ++c) h.block(a * dp, c * dp, dp, dp) = precision_(a, c) * zz;
  return h;
}

Vector VarModel::residuals(Index begin, Index end, const Vector& theta) const {
  const Index dp = d_ * p_;
  const Eigen::Map<const Matrix> b(theta.data(), dp, d_);
  Vector out(end - begin);
  for (Index i = begin; i < end; ++i) {
    const auto row = data_.values().row(i);
    const Vector r = row.head(d_).transpose() - b.transpose() * row.tail(dp).transpose();
    out(i - begin) = std::sqrt(r.dot(precision_ * r));
  }
  return out;
}

}  // namespace seqcpd
