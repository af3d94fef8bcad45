#include "seqcpd/gaussian.hpp"

#include "seqcpd/linalg.hpp"
#include "seqcpd/variance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace seqcpd {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Centers every column at its mean; constant columns become exact zeros.
Matrix center_columns(const Matrix& v, Vector& mean) {
  mean = v.colwise().mean().transpose();
  Matrix out = v;
  for (Index j = 0; j < v.cols(); ++j) {
    const auto col = v.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      mean(j) = col(0);
      out.col(j).setZero();
    } else {
      out.col(j).array() -= mean(j);
    }
  }
  return out;
}

double scale_floor(const Matrix& centered) {
  const double var = (centered.array().square().colwise().sum() / static_cast<double>(centered.rows())).maxCoeff();
  return 1e-12 * var;
}

std::optional<Eigen::LLT<Matrix>> covariance_factor(const Matrix& cov, double floor) {
  auto llt = spd_factor(cov);
  if (!llt) return std::nullopt;
  const double lo = llt->matrixLLT().diagonal().minCoeff();
  if (lo * lo <= floor) return std::nullopt;
  return llt;
}

Vector vech(const Matrix& m) {
  const Index d = m.rows();
  Vector out(d * (d + 1) / 2);
  Index k = 0;
  for (Index j = 0; j < d; ++j)
    for (Index i = j; i < d; ++i) out(k++) = m(i, j);
  return out;
}

Matrix unvech(const Vector& v, Index d) {
  Matrix m(d, d);
  Index k = 0;
  for (Index j = 0; j < d; ++j)
    for (Index i = j; i < d; ++i) {
      m(i, j) = v(k);
      m(j, i) = v(k);
      ++k;
    }
  return m;
}

Vector standardized(const Matrix& rows, const Vector& center, const Matrix& cov) {
  Vector out(rows.rows());
  auto llt = spd_factor(cov);
  for (Index i = 0; i < rows.rows(); ++i) {
    const Vector r = rows.row(i).transpose() - center;
    if (!llt) {
      out(i) = rows.cols() == 1 ? r(0) : r.norm();
    } else if (rows.cols() == 1) {
      out(i) = r(0) / std::sqrt(cov(0, 0));
    } else {
      out(i) = std::sqrt(r.dot(llt->solve(r)));
    }
  }
  return out;
}

}  // namespace

MeanModel::MeanModel(SeriesData data) : data_(std::move(data)) { init(rice_mean(data_.values())); }

MeanModel::MeanModel(SeriesData data, const Matrix& sigma) : data_(std::move(data)) { init(sigma); }

void MeanModel::init(const Matrix& sigma) {
  const Index d = data_.cols();
  if (sigma.rows() != d || sigma.cols() != d) throw InvalidConfig("mean covariance has the wrong shape");
  Vector mean;
  Matrix centered = center_columns(data_.values(), mean);
  data_ = SeriesData(std::move(centered), DataRole::unlabeled);
  sigma_ = sigma;
  const double top = sigma_.diagonal().maxCoeff();
  double ridge = top > 0.0 ? 1e-10 * top : 1.0;
  auto llt = spd_factor(sigma_);
  while (!llt) {
    sigma_ += ridge * Matrix::Identity(d, d);
    ridge *= 10.0;
    llt = spd_factor(sigma_);
  }
  precision_ = llt->solve(Matrix::Identity(d, d));
  log_det_ = log_det(*llt);
  mean_offset_ = mean;
}

double MeanModel::exact_cost(Index begin, Index end) const {
  const double n = static_cast<double>(end - begin);
  const double d = static_cast<double>(data_.cols());
  if (data_.cols() == 1) {
    const double s = data_.sum_entry(begin, end, 0);
    const double quad = std::max(0.0, precision_(0, 0) * (data_.cross_entry(begin, end, 0, 0) - s * s / n));
    return 0.5 * quad + 0.5 * n * kLog2Pi + 0.5 * n * log_det_;
  }
  double quad = 0.0;
  for (Index k = 0; k < data_.cols(); ++k) {
    const double sk = data_.sum_entry(begin, end, k);
    for (Index j = 0; j < data_.cols(); ++j)
      quad += precision_(j, k) * (data_.cross_entry(begin, end, j, k) - data_.sum_entry(begin, end, j) * sk / n);
  }
  quad = std::max(0.0, quad);
  return 0.5 * quad + 0.5 * n * d * kLog2Pi + 0.5 * n * log_det_;
}

SegmentFit MeanModel::fit(Index begin, Index end) const {
  const Vector local = data_.segment_sum(begin, end) / static_cast<double>(end - begin);
  return {local + mean_offset_, exact_cost(begin, end)};
}

double MeanModel::point_loss(Index, Index i, const Vector& theta) const {
  const Vector r = data_.values().row(i).transpose() - (theta - mean_offset_);
  return 0.5 * r.dot(precision_ * r) + 0.5 * static_cast<double>(data_.cols()) * kLog2Pi + 0.5 * log_det_;
}

double MeanModel::segment_loss(Index begin, Index end, const Vector& theta) const {
  const double n = static_cast<double>(end - begin);
  const Vector mu = theta - mean_offset_;
  const Vector s = data_.segment_sum(begin, end);
  const double quad = precision_.cwiseProduct(data_.segment_cross(begin, end)).sum() - 2.0 * mu.dot(precision_ * s) +
                      n * mu.dot(precision_ * mu);
  return 0.5 * quad + 0.5 * n * static_cast<double>(data_.cols()) * kLog2Pi + 0.5 * n * log_det_;
}

Vector MeanModel::point_gradient(Index, Index i, const Vector& theta) const {
  const Vector r = data_.values().row(i).transpose() - (theta - mean_offset_);
  return -(precision_ * r);
}

Matrix MeanModel::point_hessian(Index, Index, const Vector&) const { return precision_; }

Matrix MeanModel::segment_hessian(Index begin, Index end, const Vector&) const {
  return static_cast<double>(end - begin) * precision_;
}

Vector MeanModel::residuals(Index begin, Index end, const Vector& theta) const {
  const Matrix rows = data_.values().middleRows(begin, end - begin);
  const Vector mu = theta - mean_offset_;
  if (data_.cols() == 1) return rows.col(0).array() - mu(0);
  Vector out(end - begin);
  for (Index i = 0; i < rows.rows(); ++i) {
    const Vector r = rows.row(i).transpose() - mu;
    out(i) = std::sqrt(r.dot(precision_ * r));
  }
  return out;
}

VarianceModel::VarianceModel(const SeriesData& data) : d_(data.cols()) {
  Matrix centered = center_columns(data.values(), mean_);
  floor_ = scale_floor(centered);
  centered_ = SeriesData(std::move(centered), DataRole::unlabeled);
}

double VarianceModel::exact_cost(Index begin, Index end) const {
  const Index n = end - begin;
  if (n < d_) return kInf;
  const Matrix moment = centered_.segment_cross(begin, end) / static_cast<double>(n);
  auto llt = covariance_factor(moment, floor_);
  if (!llt) return kInf;
  const double d = static_cast<double>(d_);
  return 0.5 * static_cast<double>(n) * (d * kLog2Pi + d + log_det(*llt));
}

SegmentFit VarianceModel::fit(Index begin, Index end) const {
  const Matrix moment = centered_.segment_cross(begin, end) / static_cast<double>(end - begin);
  return {vech(moment), exact_cost(begin, end)};
}

Vector VarianceModel::residuals(Index begin, Index end, const Vector& theta) const {
  return standardized(centered_.values().middleRows(begin, end - begin), Vector::Zero(d_), unvech(theta, d_));
}

MeanVarianceModel::MeanVarianceModel(const SeriesData& data) : d_(data.cols()) {
  Matrix centered = center_columns(data.values(), mean_);
  floor_ = scale_floor(centered);
  centered_ = SeriesData(std::move(centered), DataRole::unlabeled);
}

double MeanVarianceModel::exact_cost(Index begin, Index end) const {
  const Index n = end - begin;
  if (n < d_ + 1) return kInf;
  const double nn = static_cast<double>(n);
  const Vector s = centered_.segment_sum(begin, end);
  const Matrix moment = (centered_.segment_cross(begin, end) - s * s.transpose() / nn) / nn;
  auto llt = covariance_factor(moment, floor_);
  if (!llt) return kInf;
  const double d = static_cast<double>(d_);
  return 0.5 * nn * (d * kLog2Pi + d + log_det(*llt));
}

SegmentFit MeanVarianceModel::fit(Index begin, Index end) const {
  const double nn = static_cast<double>(end - begin);
  const Vector s = centered_.segment_sum(begin, end);
  const Matrix moment = (centered_.segment_cross(begin, end) - s * s.transpose() / nn) / nn;
  Vector theta(param_dim());
  theta << s / nn + mean_, vech(moment);
  return {theta, exact_cost(begin, end)};
}

Vector MeanVarianceModel::residuals(Index begin, Index end, const Vector& theta) const {
  const Vector mu = theta.head(d_) - mean_;
  return standardized(centered_.values().middleRows(begin, end - begin), mu, unvech(theta.tail(theta.size() - d_), d_));
}

double lower_median(const Vector& values, Index begin, Index end) {
  std::vector<double> buf(values.data() + begin, values.data() + end);
  const auto mid = buf.begin() + static_cast<std::ptrdiff_t>((buf.size() - 1) / 2);
  std::nth_element(buf.begin(), mid, buf.end());
  return *mid;
}

MedianModel::MedianModel(const SeriesData& data) : MedianModel(data, laplace_rice(data.values().col(0))) {}

MedianModel::MedianModel(const SeriesData& data, double sigma2) {
  if (data.cols() != 1) throw InvalidConfig("median family needs univariate data");
  if (!(sigma2 >= 0.0)) throw InvalidConfig("median scale must be nonnegative");
  x_ = data.values().col(0);
  const double floor = 1e-12 * std::max(x_.cwiseAbs2().mean(), 1e-300);
  sigma2_ = std::max(sigma2, floor);
  scale_ = 2.0 * std::sqrt(sigma2_);
}

double MedianModel::exact_cost(Index begin, Index end) const {
  const double med = lower_median(x_, begin, end);
  return (x_.segment(begin, end - begin).array() - med).abs().sum() / scale_;
}

SegmentFit MedianModel::fit(Index begin, Index end) const {
  Vector theta(1);
  theta(0) = lower_median(x_, begin, end);
  return {theta, exact_cost(begin, end)};
}

double MedianModel::point_loss(Index, Index i, const Vector& theta) const { return std::abs(x_(i) - theta(0)) / scale_; }

Vector MedianModel::residuals(Index begin, Index end, const Vector& theta) const {
  return x_.segment(begin, end - begin).array() - theta(0);
}

}  // namespace seqcpd
