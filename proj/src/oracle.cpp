#include "seqcpd/oracle.hpp"

#include "seqcpd/engine.hpp"
#include "seqcpd/linalg.hpp"

#include <cmath>

namespace seqcpd {

namespace {

Vector projected_gradient(const Vector& g, const Vector& theta, const Vector& lo, const Vector& hi) {
  Vector pg = g;
  for (Index k = 0; k < g.size(); ++k) {
    if (theta(k) <= lo(k) && g(k) > 0.0) pg(k) = 0.0;
    if (theta(k) >= hi(k) && g(k) < 0.0) pg(k) = 0.0;
  }
  return pg;
}

double objective(const CostModel& model, Index begin, Index end, const Vector& theta) {
  const double f = model.segment_loss(begin, end, theta);
  return std::isnan(f) ? kInf : f;
}

Vector newton_direction(const Matrix& h, const Vector& g, const std::vector<bool>& free) {
  const Index d = g.size();
  std::vector<Index> idx;
  for (Index k = 0; k < d; ++k)
    if (free[static_cast<std::size_t>(k)]) idx.push_back(k);
  Vector dir = Vector::Zero(d);
  if (idx.empty()) return dir;
  const Index m = static_cast<Index>(idx.size());
  Matrix hf(m, m);
  Vector gf(m);
  for (Index a = 0; a < m; ++a) {
    gf(a) = g(idx[a]);
    for (Index b = 0; b < m; ++b) hf(a, b) = h(idx[a], idx[b]);
  }
  double scale = hf.diagonal().cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || scale <= 0.0) scale = 1.0;
  double ridge = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Matrix a = hf;
    a.diagonal().array() += ridge;
    if (auto llt = spd_factor(a)) {
      const Vector step = llt->solve(gf);
      if (step.allFinite()) {
        for (Index k = 0; k < m; ++k) dir(idx[k]) = -step(k);
        return dir;
      }
    }
    ridge = ridge == 0.0 ? 1e-8 * scale : ridge * 10.0;
  }
  for (Index k = 0; k < m; ++k) dir(idx[k]) = -gf(k) / scale;
  return dir;
}

}  // namespace

MinimizeResult exact_minimize(const CostModel& model, Index begin, Index end, const Vector& start, int max_iter,
                              double tol) {
  if (!model.has_loss() || !model.has_derivatives())
    throw UnsupportedFamily(model.name() + " cannot be minimized numerically");
  const Vector lo = model.lower();
  const Vector hi = model.upper();
  MinimizeResult out;
  Vector theta = start;
  project_box(theta, lo, hi);
  double f = objective(model, begin, end, theta);
  out.trace.push_back(f);
  const Index d = theta.size();
  for (int iter = 0; iter < max_iter; ++iter) {
    const Vector g = model.segment_gradient(begin, end, theta);
    if (!g.allFinite()) throw NonFiniteGradient(model.name() + ": non-finite gradient during exact minimization");
    const Vector pg = projected_gradient(g, theta, lo, hi);
    out.grad_norm = pg.norm();
    if (out.grad_norm < tol) {
      out.converged = true;
      break;
    }
    std::vector<bool> free(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) free[static_cast<std::size_t>(k)] = pg(k) != 0.0 || (theta(k) > lo(k) && theta(k) < hi(k));
    const Matrix h = model.segment_hessian(begin, end, theta);
    const Vector dir = newton_direction(h, g, free);
    bool accepted = false;
    double step = 1.0;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      Vector cand = theta + step * dir;
      project_box(cand, lo, hi);
      const double fc = objective(model, begin, end, cand);
      if (fc <= f) {
        const bool moved = (cand - theta).norm() > 0.0;
        theta = cand;
        accepted = moved;
        f = fc;
        break;
      }
    }
    out.iterations = iter + 1;
    if (!accepted) {
      out.grad_norm = projected_gradient(model.segment_gradient(begin, end, theta), theta, lo, hi).norm();
      out.converged = out.grad_norm < tol;
      break;
    }
    out.trace.push_back(f);
  }
  out.theta = theta;
  out.cost = f;
  return out;
}

MinimizeResult exact_minimize(const CostModel& model, Index begin, Index end) {
  return exact_minimize(model, begin, end, model.initial_guess(begin, end));
}

DpSolution dp_exhaustive_raw(const CostModel& model, const PenaltySpec& penalty) {
  const Index T = model.size();
  const Index m = model.min_segment_length();
  DpSolution sol;
  sol.F.assign(static_cast<std::size_t>(T + 1), kInf);
  std::vector<Index> last(static_cast<std::size_t>(T + 1), -1);
  sol.F[0] = -penalty.beta;
  for (Index t = m; t <= T; ++t) {
    double best = kInf;
    Index arg = -1;
    for (Index tau = 0; tau + m <= t; ++tau) {
      const double ft = sol.F[static_cast<std::size_t>(tau)];
      if (!std::isfinite(ft)) continue;
      const double val = candidate_value(ft, model.exact_cost(tau, t), penalty, t - tau);
      if (val < best) {
        best = val;
        arg = tau;
      }
    }
    sol.F[static_cast<std::size_t>(t)] = best;
    last[static_cast<std::size_t>(t)] = arg;
  }
  sol.objective = sol.F[static_cast<std::size_t>(T)];
  if (std::isfinite(sol.objective)) sol.cps = backtrack(last, T);
  return sol;
}

DetectionResult dp_exhaustive(const CostModel& model, const PenaltySpec& penalty, bool cp_only) {
  const DpSolution sol = dp_exhaustive_raw(model, penalty);
  DetectionResult r = report_segments(model, sol.cps, cp_only);
  r.objective = sol.objective;
  r.raw_cp_set = r.cp_set;
  return r;
}

}  // namespace seqcpd
