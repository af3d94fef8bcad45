#include "helpers.hpp"

#include "seqcpd/datagen.hpp"

using namespace seqcpd;
using doctest::Approx;

TEST_CASE("generator shapes and change points") {
  const Generated mean = generate("mean", 1);
  CHECK(mean.values.rows() == 1000);
  CHECK(mean.values.cols() == 3);
  CHECK(mean.true_cps == std::vector<Index>{300, 700});
  CHECK(mean.true_params.size() == 3);

  const Generated var2 = generate("var2", 1);
  CHECK(var2.values.rows() == 300);
  CHECK(var2.values.cols() == 2);
  CHECK(var2.true_cps == std::vector<Index>{200});
  CHECK(var2.family == "var");
  CHECK(var2.p == 2);

  for (const std::string& id : dgp_ids()) {
    const Generated g = generate(id, 2);
    REQUIRE(g.values.allFinite());
    REQUIRE(g.true_params.size() == g.true_cps.size() + 1);
    REQUIRE(std::is_sorted(g.true_cps.begin(), g.true_cps.end()));
    REQUIRE(g.true_cps.back() < g.values.rows());
    CHECK_NOTHROW(g.series());
  }
}

TEST_CASE("generators are deterministic per seed") {
  for (const std::string& id : dgp_ids()) {
    const Generated a = generate(id, 7);
    const Generated b = generate(id, 7);
    const Generated c = generate(id, 8);
    REQUIRE(a.values == b.values);
    REQUIRE(a.values != c.values);
  }
  CHECK_THROWS_AS(generate("nope", 1), UnknownDgp);
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(5), b(5), c(5, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    REQUIRE(x == b.normal());
    REQUIRE(x != c.normal());
  }
  Rng u(9);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double v = u.normal(2.0, 3.0);
    sum += v;
    sq += v * v;
  }
  CHECK(sum / 20000.0 == Approx(2.0).epsilon(0.05));
  CHECK(sq / 20000.0 - (sum / 20000.0) * (sum / 20000.0) == Approx(9.0).epsilon(0.05));
  for (double lambda : {0.5, 4.0, 30.0}) {
    double s = 0.0;
    for (int i = 0; i < 20000; ++i) s += static_cast<double>(u.poisson(lambda));
    CHECK(s / 20000.0 == Approx(lambda).epsilon(0.05));
  }
}

TEST_CASE("huber rho") {
  CHECK(huber_rho(0.5, 1.0) == Approx(0.125));
  CHECK(huber_rho(-2.0, 1.0) == Approx(1.5));
  CHECK(huber_rho(2.0, 1.0) == Approx(1.5));
}

TEST_CASE("segment statistics match the true parameters") {
  const Generated mean = generate("mean", 3);
  for (std::size_t s = 0; s < 3; ++s) {
    const Index b = s == 0 ? 0 : mean.true_cps[s - 1];
    const Index e = s == 2 ? mean.values.rows() : mean.true_cps[s];
    const Vector mu = mean.values.middleRows(b, e - b).colwise().mean().transpose();
    for (Index k = 0; k < 3; ++k) CHECK(std::abs(mu(k) - mean.true_params[s](k)) < 2.5);
  }

  const Generated mv = generate("meanvariance", 3);
  const Index b = mv.true_cps[1];
  const Index e = mv.true_cps[2];
  const Matrix seg = mv.values.middleRows(b, e - b);
  const double m0 = seg.col(0).mean();
  const double v0 = (seg.col(0).array() - m0).square().mean();
  CHECK(std::abs(m0 - mv.true_params[2](0)) < 2.0);
  CHECK(v0 == Approx(mv.true_params[2](4)).epsilon(0.2));
}
