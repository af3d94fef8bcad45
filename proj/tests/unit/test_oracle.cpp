#include "helpers.hpp"

#include "seqcpd/engine.hpp"
#include "seqcpd/gaussian.hpp"
#include "seqcpd/oracle.hpp"
#include "seqcpd/regression.hpp"

using namespace seqcpd;
using doctest::Approx;

namespace {

Matrix labeled(const Vector& y, const Matrix& x) {
  Matrix m(x.rows(), x.cols() + 1);
  m << y, x;
  return m;
}

}  // namespace

TEST_CASE("exhaustive DP on a two-level series") {
  Matrix x(40, 1);
  for (Index t = 0; t < 40; ++t) x(t, 0) = (t < 20 ? 0.0 : 5.0) + 0.1 * ((t % 3) - 1.0);
  const MeanModel m(SeriesData(x, DataRole::unlabeled), Matrix::Identity(1, 1));
  PenaltyChoice c;
  c.criterion = Criterion::bic;
  const PenaltySpec pen = resolve_penalty(c, 1, 40, 0.0);
  const DpSolution sol = dp_exhaustive_raw(m, pen);
  CHECK(sol.cps == std::vector<Index>{20});
  CHECK(sol.objective == Approx(m.exact_cost(0, 20) + m.exact_cost(20, 40) + pen.beta).epsilon(1e-12));
  CHECK(sol.F.size() == 41);
  CHECK(sol.F[0] == -pen.beta);

  const DetectionResult r = dp_exhaustive(m, pen);
  CHECK(r.cp_set == std::vector<Index>{20});
  REQUIRE(r.thetas.size() == 2);
  CHECK(r.thetas[1](0) == Approx(5.0).epsilon(0.01));
}

TEST_CASE("exhaustive DP objective is monotone in the penalty") {
  Rng rng(61);
  const Matrix x = test::piecewise_mean(rng, {30, 30, 30}, {0.0, 1.0, 0.0});
  const MeanModel m(SeriesData(x, DataRole::unlabeled), Matrix::Identity(1, 1));
  PenaltyChoice c;
  c.criterion = Criterion::manual;
  double prev = -kInf;
  for (double beta : {0.0, 1.0, 3.0, 10.0, 30.0}) {
    c.beta = beta;
    const DpSolution sol = dp_exhaustive_raw(m, resolve_penalty(c, 1, 90, 0.0));
    CHECK(sol.objective >= prev - 1e-12);
    for (std::size_t t = static_cast<std::size_t>(m.min_segment_length()); t < sol.F.size(); ++t) REQUIRE(std::isfinite(sol.F[t]));
    prev = sol.objective;
  }
}

TEST_CASE("pruned exact detection equals the exhaustive DP") {
  Rng rng(62);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = test::piecewise_mean(rng, {25, 40, 35, 50}, {0.0, 1.2, -0.5, 0.7});
    const MeanModel m(SeriesData(x, DataRole::unlabeled), Matrix::Identity(1, 1));
    for (Criterion crit : {Criterion::bic, Criterion::mbic, Criterion::mdl}) {
      DetectorConfig cfg;
      cfg.vanilla_percentage = 1.0;
      cfg.trim = 0.0;
      cfg.penalty.criterion = crit;
      const DetectionResult r = detect(cfg, m);
      const DpSolution ref = dp_exhaustive_raw(m, resolve_for(cfg, m));
      REQUIRE(r.raw_cp_set == ref.cps);
      REQUIRE(r.objective == Approx(ref.objective).epsilon(1e-10));
    }
  }
}

TEST_CASE("exact_minimize recovers the segment mean") {
  Rng rng(63);
  const Matrix x = test::gaussian_matrix(rng, 25, 2, 3.0);
  Matrix sigma(2, 2);
  sigma << 2.0, 0.5, 0.5, 1.0;
  const MeanModel m(SeriesData(x, DataRole::unlabeled), sigma);
  const MinimizeResult r = exact_minimize(m, 3, 21, Vector::Zero(2));
  CHECK(r.converged);
  CHECK(test::all_close(r.theta, x.middleRows(3, 18).colwise().mean().transpose(), 1e-9));
  CHECK(r.cost == Approx(m.exact_cost(3, 21)).epsilon(1e-12));
  CHECK(r.grad_norm < 1e-9);
}

TEST_CASE("exact_minimize on separable binomial data stops at the bound") {
  Matrix x(20, 1);
  Vector y(20);
  for (Index i = 0; i < 20; ++i) {
    x(i, 0) = i < 10 ? -1.0 - 0.1 * static_cast<double>(i) : 1.0 + 0.1 * static_cast<double>(i);
    y(i) = i < 10 ? 0.0 : 1.0;
  }
  GlmModel m(SeriesData(labeled(y, x), DataRole::labeled), GlmLink::binomial);
  m.set_bounds(Vector::Constant(1, -8.0), Vector::Constant(1, 8.0));
  const MinimizeResult r = exact_minimize(m, 0, 20, Vector::Zero(1));
  CHECK(r.theta(0) == Approx(8.0).epsilon(1e-9));
  REQUIRE(r.trace.size() >= 2);
  for (std::size_t k = 1; k < r.trace.size(); ++k) REQUIRE(r.trace[k] <= r.trace[k - 1] + 1e-12);
  CHECK(r.cost == Approx(m.segment_loss(0, 20, r.theta)).epsilon(1e-12));
}
