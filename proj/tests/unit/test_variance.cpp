#include "helpers.hpp"

#include "seqcpd/variance.hpp"

using namespace seqcpd;
using doctest::Approx;

namespace {

// Direct evaluation of the windowed estimator, one inverse per window.
double grice_direct(const Matrix& x, const Vector& y, Index M) {
  const Index T = x.rows();
  auto gram = [&](Index a, Index b) { return Matrix(x.middleRows(a, b - a).transpose() * x.middleRows(a, b - a)); };
  auto theta = [&](Index t) {
    const Matrix g = gram(t, t + M);
    return Vector(g.inverse() * (x.middleRows(t, M).transpose() * y.segment(t, M)));
  };
  double total = 0.0;
  for (Index t = 0; t < T - M; ++t) {
    const Matrix h0 = gram(t, t + M).inverse();
    const Matrix h1 = gram(t + 1, t + 1 + M).inverse();
    const Matrix c = h0 * gram(t + 1, t + M) * h1;
    const Vector diff = theta(t + 1) - theta(t);
    total += diff.squaredNorm() / (h1 + h0 - 2.0 * c).trace();
  }
  return total / static_cast<double>(T - M);
}

}  // namespace

TEST_CASE("rice_mean") {
  CHECK(rice_mean(Matrix::Constant(20, 2, 3.5)).isZero());
  Matrix alt(10, 1);
  for (Index i = 0; i < 10; ++i) alt(i, 0) = (i % 2) ? 2.0 : 0.0;
  CHECK(rice_mean(alt)(0, 0) == Approx(2.0));

  Rng rng(8);
  const Matrix iid = test::gaussian_matrix(rng, 5000, 2, 3.0);
  const Matrix s = rice_mean(iid);
  CHECK(s(0, 0) == Approx(9.0).epsilon(0.1));
  CHECK(s(1, 1) == Approx(9.0).epsilon(0.1));
  CHECK(s.isApprox(s.transpose()));
}

TEST_CASE("rice_mean survives a mean shift") {
  Rng rng(9);
  const Matrix x = test::piecewise_mean(rng, {2500, 2500}, {0.0, 20.0}, 2.0);
  CHECK(rice_mean(x)(0, 0) == Approx(4.0).epsilon(0.15));
}

TEST_CASE("grice_lm matches the direct window formula") {
  Rng rng(21);
  const Index T = 40, d = 3;
  const Matrix x = test::gaussian_matrix(rng, T, d);
  Vector theta(d);
  theta << 1.0, -2.0, 0.5;
  Vector y = x * theta;
  for (Index i = 0; i < T; ++i) y(i) += rng.normal(0.0, 0.7);
  CHECK(grice_lm(x, y, 5) == Approx(grice_direct(x, y, 5)).epsilon(1e-10));
  CHECK(grice_lm(x, y, 8) == Approx(grice_direct(x, y, 8)).epsilon(1e-10));
}

TEST_CASE("grice_lm on noiseless data is zero") {
  Rng rng(22);
  const Matrix x = test::gaussian_matrix(rng, 60, 2);
  Vector theta(2);
  theta << 3.0, -1.0;
  CHECK(std::abs(grice_lm(x, x * theta, 5)) < 1e-12);
}

TEST_CASE("grice window denominators are positive") {
  Rng rng(23);
  for (int rep = 0; rep < 1000; ++rep) {
    const Matrix x = test::gaussian_matrix(rng, 6, 3);
    const Matrix h0 = (x.topRows(5).transpose() * x.topRows(5)).inverse();
    const Matrix h1 = (x.bottomRows(5).transpose() * x.bottomRows(5)).inverse();
    const Matrix mid = x.middleRows(1, 4).transpose() * x.middleRows(1, 4);
    REQUIRE((h1 + h0 - 2.0 * h0 * mid * h1).trace() > 0.0);
  }
}

TEST_CASE("grice_lm is robust to a coefficient change") {
  Rng rng(24);
  const Index T = 2000, d = 3;
  const Matrix x = test::gaussian_matrix(rng, T, d);
  Vector a(d), b(d);
  a << 2.0, 0.0, -1.0;
  b << -3.0, 4.0, 1.0;
  Vector y(T);
  for (Index i = 0; i < T; ++i) y(i) = x.row(i).dot(i < T / 2 ? a : b) + rng.normal(0.0, 2.0);
  CHECK(grice_lm(x, y, default_grice_window(d)) == Approx(4.0).epsilon(0.15));
}

TEST_CASE("grice window default and degenerate input") {
  CHECK(default_grice_window(1) == 5);
  CHECK(default_grice_window(3) == 5);
  CHECK(default_grice_window(6) == 8);
  CHECK_THROWS_AS(grice_lm(Matrix::Zero(30, 2), Vector::Zero(30), 5), DegenerateSegment);
}

TEST_CASE("laplace_rice") {
  CHECK(laplace_rice(Vector::Constant(30, -2.0)) == 0.0);
  Vector two(2);
  two << 0.0, 3.0;
  CHECK(laplace_rice(two) == Approx(2.0 * 4.0));
  Rng rng(4);
  Vector v(10000);
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.laplace(1.5);
  CHECK(laplace_rice(v) == Approx(2.0 * 1.5 * 1.5).epsilon(0.1));
}

TEST_CASE("grice_multi reduces to grice_lm for one response") {
  Rng rng(25);
  const Matrix x = test::gaussian_matrix(rng, 80, 2);
  Vector y = x.col(0) * 1.5 + x.col(1);
  for (Index i = 0; i < y.size(); ++i) y(i) += rng.normal();
  const Matrix m = grice_multi(x, y, 6);
  REQUIRE(m.rows() == 1);
  CHECK(m(0, 0) == Approx(grice_lm(x, y, 6)).epsilon(1e-10));
}
