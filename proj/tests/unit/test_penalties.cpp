#include "helpers.hpp"

#include "seqcpd/gaussian.hpp"
#include "seqcpd/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

using namespace seqcpd;
using doctest::Approx;

TEST_CASE("beta_value for the three criteria") {
  CHECK(beta_value(Criterion::bic, 1, 1000) == Approx(6.907755278982137).epsilon(1e-12));
  CHECK(beta_value(Criterion::mbic, 3, 1000) == Approx(17.269388197455342).epsilon(1e-12));
  CHECK(beta_value(Criterion::mdl, 3, 1000) == Approx(24.914460711655218).epsilon(1e-12));
  CHECK_THROWS_AS(beta_value(Criterion::manual, 1, 100), InvalidConfig);
}

TEST_CASE("cost_adjustment") {
  for (Index T : {10, 1000})
    for (auto kind : {AdjustmentKind::none, AdjustmentKind::mbic, AdjustmentKind::mdl})
      CHECK(cost_adjustment(kind, T, T, 3) == 0.0);
  CHECK(cost_adjustment(AdjustmentKind::mbic, 500, 1000, 2) == Approx(-0.6931471805599453).epsilon(1e-12));
  CHECK(cost_adjustment(AdjustmentKind::mdl, 250, 1000, 2) == Approx(-2.0).epsilon(1e-12));
  CHECK(cost_adjustment(AdjustmentKind::none, 7, 1000, 4) == 0.0);
  for (Index n = 1; n <= 100; ++n) {
    CHECK(cost_adjustment(AdjustmentKind::mbic, n, 100, 3) <= 0.0);
    CHECK(cost_adjustment(AdjustmentKind::mdl, n, 100, 3) <= 0.0);
  }
}

TEST_CASE("pruning_constant") {
  CHECK(pruning_constant(AdjustmentKind::none, 3, 0.0) == 0.0);
  CHECK(pruning_constant(AdjustmentKind::none, 3, -1.5) == -1.5);
  CHECK(pruning_constant(AdjustmentKind::mbic, 3, 0.0) == Approx(2.0794415416798357).epsilon(1e-12));
  CHECK(pruning_constant(AdjustmentKind::mdl, 3, 0.0) == Approx(3.0).epsilon(1e-12));
  CHECK(pruning_constant(AdjustmentKind::mdl, 2, 1.0) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("resolve_penalty defaults follow the criterion") {
  PenaltyChoice c;
  const PenaltySpec m = resolve_penalty(c, 2, 100, 0.0);
  CHECK(m.adjustment == AdjustmentKind::mbic);
  CHECK(m.beta == Approx(2.0 * std::log(100.0)));
  CHECK(m.pruning() == Approx(2.0 * std::log(2.0)));

  c.criterion = Criterion::bic;
  const PenaltySpec b = resolve_penalty(c, 2, 100, 0.0);
  CHECK(b.adjustment == AdjustmentKind::none);
  CHECK(b.adjust(10) == 0.0);
  CHECK(b.pruning() == 0.0);

  c.criterion = Criterion::manual;
  c.beta = 4.5;
  const PenaltySpec man = resolve_penalty(c, 2, 100, -3.0);
  CHECK(man.beta == 4.5);
  CHECK(man.adjustment == AdjustmentKind::none);
  CHECK(man.pruning() == -3.0);

  c.adjustment = AdjustmentKind::mdl;
  CHECK(resolve_penalty(c, 2, 100, 0.0).adjustment == AdjustmentKind::mdl);

  c.beta = -1.0;
  CHECK_THROWS_AS(resolve_penalty(c, 2, 100, 0.0), InvalidConfig);
  c.beta = std::nan("");
  CHECK_THROWS_AS(resolve_penalty(c, 2, 100, 0.0), InvalidConfig);
}

TEST_CASE("criterion names parse case-insensitively") {
  CHECK(parse_criterion("MBIC") == Criterion::mbic);
  CHECK(parse_criterion("bic") == Criterion::bic);
  CHECK(parse_criterion("Mdl") == Criterion::mdl);
  CHECK_THROWS_AS(parse_criterion("aic"), InvalidConfig);
  CHECK(parse_adjustment("none") == AdjustmentKind::none);
  CHECK(parse_adjustment("MBIC") == AdjustmentKind::mbic);
  CHECK_THROWS_AS(parse_adjustment("x"), InvalidConfig);
}

TEST_CASE("adjusted Gaussian mean cost is subadditive with the mBIC pruning constant") {
  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    const Index T = 40;
    const Matrix x = test::gaussian_matrix(rng, T, 1);
    const MeanModel model(SeriesData(x, DataRole::unlabeled), Matrix::Identity(1, 1));
    const PenaltySpec pen = resolve_penalty(PenaltyChoice{}, 1, T, 0.0);
    auto tilde = [&](Index b, Index e) { return model.exact_cost(b, e) + pen.adjust(e - b); };
    for (Index a = 0; a < T; ++a)
      for (Index t = a + 1; t < T; ++t)
        for (Index u = t + 1; u <= T; ++u) REQUIRE(tilde(a, t) + tilde(t, u) + pen.pruning() <= tilde(a, u) + 1e-9);
  }
}

TEST_CASE("mBIC matches the Gaussian location closed form up to a constant") {
  Rng rng(5);
  const Index T = 120;
  const Matrix x = test::piecewise_mean(rng, {40, 50, 30}, {0.0, 1.5, -1.0});
  const MeanModel model(SeriesData(x, DataRole::unlabeled), Matrix::Identity(1, 1));
  const PenaltySpec pen = resolve_penalty(PenaltyChoice{}, 1, T, 0.0);
  const double zbar = x.col(0).mean();
  std::optional<double> offset;
  for (int rep = 0; rep < 50; ++rep) {
    const int k = static_cast<int>(rng.uniform() * 5.0);
    std::vector<Index> cps;
    while (static_cast<int>(cps.size()) < k) {
      const Index c = 1 + static_cast<Index>(rng.uniform() * static_cast<double>(T - 1));
      if (std::find(cps.begin(), cps.end(), c) == cps.end()) cps.push_back(c);
    }
    std::sort(cps.begin(), cps.end());
    std::vector<Index> bounds{0};
    bounds.insert(bounds.end(), cps.begin(), cps.end());
    bounds.push_back(T);
    double ours = 0.0;
    double closed = 0.0;
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
      const Index b = bounds[j], e = bounds[j + 1];
      const double n = static_cast<double>(e - b);
      ours += model.exact_cost(b, e) + pen.adjust(e - b) + pen.beta;
      const double mu = x.col(0).segment(b, e - b).mean();
      closed += -0.5 * n * (mu - zbar) * (mu - zbar) + 0.5 * std::log(n);
    }
    closed += (static_cast<double>(k) - 0.5) * std::log(static_cast<double>(T));
    if (!offset) offset = ours - closed;
    CHECK(std::abs(ours - closed - *offset) < 1e-8);
  }
  const double Td = static_cast<double>(T);
  const double c_T =
      0.5 * (3.0 * std::log(Td) + Td * std::log(2.0 * std::numbers::pi) + x.col(0).squaredNorm() - Td * zbar * zbar);
  CHECK(*offset == Approx(c_T).epsilon(1e-10));
}
