#include "helpers.hpp"

#include "seqcpd/gaussian.hpp"
#include "seqcpd/variance.hpp"

#include <numbers>

using namespace seqcpd;
using doctest::Approx;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double direct_mean_cost(const Matrix& x, Index b, Index e, const Matrix& sigma) {
  const Matrix rows = x.middleRows(b, e - b);
  const Vector mu = rows.colwise().mean().transpose();
  const Matrix prec = sigma.inverse();
  double quad = 0.0;
  for (Index i = 0; i < rows.rows(); ++i) {
    const Vector r = rows.row(i).transpose() - mu;
    quad += r.dot(prec * r);
  }
  const double n = static_cast<double>(e - b), d = static_cast<double>(x.cols());
  return 0.5 * quad + 0.5 * n * d * kLog2Pi + 0.5 * n * std::log(sigma.determinant());
}

double direct_gauss_cost(const Matrix& rows, const Vector& center) {
  Matrix m = Matrix::Zero(rows.cols(), rows.cols());
  for (Index i = 0; i < rows.rows(); ++i) {
    const Vector r = rows.row(i).transpose() - center;
    m += r * r.transpose();
  }
  const double n = static_cast<double>(rows.rows()), d = static_cast<double>(rows.cols());
  m /= n;
  return 0.5 * n * (d * kLog2Pi + d + std::log(m.determinant()));
}

Matrix random_spd(Rng& rng, Index d) {
  const Matrix a = test::gaussian_matrix(rng, d, d);
  return a * a.transpose() + static_cast<double>(d) * Matrix::Identity(d, d);
}

}  // namespace

TEST_CASE("mean cost examples") {
  const MeanModel zeros(SeriesData(Matrix::Zero(4, 1), DataRole::unlabeled), Matrix::Identity(1, 1));
  CHECK(zeros.exact_cost(0, 4) == Approx(3.6757541328186907).epsilon(1e-12));

  Rng rng(1);
  const Matrix x = test::gaussian_matrix(rng, 10, 2);
  const Matrix sigma = random_spd(rng, 2);
  const MeanModel m(SeriesData(x, DataRole::unlabeled), sigma);
  CHECK(m.exact_cost(3, 4) == Approx(kLog2Pi + 0.5 * std::log(sigma.determinant())).epsilon(1e-10));
}

TEST_CASE("mean cost equals direct recomputation") {
  Rng rng(2);
  const Matrix x = test::gaussian_matrix(rng, 80, 3, 4.0);
  const Matrix sigma = random_spd(rng, 3);
  const MeanModel m(SeriesData(x, DataRole::unlabeled), sigma);
  const MeanModel u(SeriesData(x.leftCols(1), DataRole::unlabeled), sigma.topLeftCorner(1, 1));
  for (int rep = 0; rep < 200; ++rep) {
    const Index b = static_cast<Index>(rng.uniform() * 79.0);
    const Index e = b + 1 + static_cast<Index>(rng.uniform() * static_cast<double>(79 - b));
    REQUIRE(m.exact_cost(b, e) == Approx(direct_mean_cost(x, b, e, sigma)).epsilon(1e-9));
    REQUIRE(u.exact_cost(b, e) == Approx(direct_mean_cost(x.leftCols(1), b, e, sigma.topLeftCorner(1, 1))).epsilon(1e-9));
  }
}

TEST_CASE("mean cost uses the Rice covariance by default") {
  Rng rng(3);
  const Matrix x = test::gaussian_matrix(rng, 200, 2);
  const MeanModel m(SeriesData(x, DataRole::unlabeled));
  CHECK(test::all_close(m.sigma_hat(), rice_mean(x), 1e-12));
}

TEST_CASE("the segment mean minimizes the mean loss") {
  Rng rng(4);
  const Matrix x = test::gaussian_matrix(rng, 30, 2);
  const MeanModel m(SeriesData(x, DataRole::unlabeled), random_spd(rng, 2));
  const SegmentFit fit = m.fit(5, 25);
  CHECK(test::all_close(fit.theta, x.middleRows(5, 20).colwise().mean().transpose(), 1e-12));
  CHECK(m.segment_loss(5, 25, fit.theta) == Approx(fit.cost).epsilon(1e-12));
  for (int rep = 0; rep < 50; ++rep) {
    Vector theta = fit.theta;
    theta(0) += rng.normal(0.0, 0.5);
    theta(1) += rng.normal(0.0, 0.5);
    REQUIRE(m.segment_loss(5, 25, theta) > fit.cost);
  }
}

TEST_CASE("mean cost is subadditive") {
  Rng rng(5);
  const Matrix x = test::gaussian_matrix(rng, 30, 1);
  const MeanModel m(SeriesData(x, DataRole::unlabeled), Matrix::Identity(1, 1));
  for (Index a = 0; a < 30; ++a)
    for (Index t = a + 1; t < 30; ++t)
      for (Index u = t + 1; u <= 30; ++u) REQUIRE(m.exact_cost(a, t) + m.exact_cost(t, u) <= m.exact_cost(a, u) + 1e-9);
}

TEST_CASE("mean loss derivatives") {
  Rng rng(6);
  const Matrix x = test::gaussian_matrix(rng, 12, 2);
  const Matrix sigma = random_spd(rng, 2);
  const MeanModel m(SeriesData(x, DataRole::unlabeled), sigma);
  const Vector theta = test::gaussian_matrix(rng, 2, 1);
  const Vector g = test::fd_gradient([&](const Vector& t) { return m.point_loss(0, 4, t); }, theta);
  CHECK(test::scaled_error(m.point_gradient(0, 4, theta), g) < 1e-6);
  CHECK(test::all_close(m.point_hessian(0, 4, theta), sigma.inverse(), 1e-10));
}

TEST_CASE("variance cost") {
  const VarianceModel v(SeriesData(test::column({1, -1, 1, -1}), DataRole::unlabeled));
  CHECK(v.exact_cost(0, 4) == Approx(5.675754132818691).epsilon(1e-12));

  Rng rng(7);
  const Matrix x = test::gaussian_matrix(rng, 60, 3, 2.0);
  const VarianceModel m(SeriesData(x, DataRole::unlabeled));
  CHECK(m.exact_cost(10, 12) == kInf);
  const Vector gm = x.colwise().mean().transpose();
  for (int rep = 0; rep < 200; ++rep) {
    const Index b = static_cast<Index>(rng.uniform() * 50.0);
    const Index e = b + 5 + static_cast<Index>(rng.uniform() * static_cast<double>(55 - b));
    REQUIRE(m.exact_cost(b, e) == Approx(direct_gauss_cost(x.middleRows(b, e - b), gm)).epsilon(1e-9));
  }
}

TEST_CASE("mean-variance cost") {
  const MeanVarianceModel mv(SeriesData(test::column({0, 2, 5, 1, 1, 1, 1}), DataRole::unlabeled));
  CHECK(mv.exact_cost(0, 2) == Approx(2.8378770664093453).epsilon(1e-12));
  CHECK(mv.exact_cost(3, 7) == kInf);
  CHECK(mv.exact_cost(0, 1) == kInf);

  Rng rng(8);
  const Matrix x = test::gaussian_matrix(rng, 60, 2, 3.0);
  const MeanVarianceModel m(SeriesData(x, DataRole::unlabeled));
  for (int rep = 0; rep < 200; ++rep) {
    const Index b = static_cast<Index>(rng.uniform() * 50.0);
    const Index e = b + 5 + static_cast<Index>(rng.uniform() * static_cast<double>(55 - b));
    const Matrix rows = x.middleRows(b, e - b);
    REQUIRE(m.exact_cost(b, e) == Approx(direct_gauss_cost(rows, rows.colwise().mean().transpose())).epsilon(1e-9));
  }
}

TEST_CASE("median cost") {
  const MedianModel m(SeriesData(test::column({1, 2, 9, 1, 2, 3, 10, 4, 4, 4}), DataRole::unlabeled), 4.0);
  CHECK(m.exact_cost(0, 3) == Approx(2.0).epsilon(1e-12));
  CHECK(m.exact_cost(3, 7) == Approx(2.5).epsilon(1e-12));
  CHECK(m.exact_cost(7, 10) == 0.0);
  CHECK(m.fit(3, 7).theta(0) == 2.0);

  Vector v(4);
  v << 4, 1, 3, 2;
  CHECK(lower_median(v, 0, 4) == 2.0);
  CHECK(lower_median(v, 0, 3) == 3.0);
  CHECK_THROWS_AS(MedianModel(SeriesData(Matrix::Zero(5, 2), DataRole::unlabeled)), InvalidConfig);
}

TEST_CASE("median cost equals direct recomputation") {
  Rng rng(9);
  Vector x(50);
  for (Index i = 0; i < 50; ++i) x(i) = rng.laplace(2.0);
  const MedianModel m(SeriesData(Matrix(x), DataRole::unlabeled));
  CHECK(m.sigma2() == Approx(laplace_rice(x)));
  for (int rep = 0; rep < 200; ++rep) {
    const Index b = static_cast<Index>(rng.uniform() * 49.0);
    const Index e = b + 1 + static_cast<Index>(rng.uniform() * static_cast<double>(49 - b));
    std::vector<double> seg(x.data() + b, x.data() + e);
    std::sort(seg.begin(), seg.end());
    const double med = seg[(seg.size() - 1) / 2];
    double total = 0.0;
    for (double s : seg) total += std::abs(s - med);
    REQUIRE(m.exact_cost(b, e) == Approx(total / (2.0 * std::sqrt(m.sigma2()))).epsilon(1e-9));
  }
}
