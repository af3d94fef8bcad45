#pragma once

#include "seqcpd/cost_model.hpp"
#include "seqcpd/penalties.hpp"
#include "seqcpd/result.hpp"

#include <vector>

namespace seqcpd {

struct MinimizeResult {
  Vector theta;
  double cost = kInf;
  bool converged = false;
  double grad_norm = kInf;
  int iterations = 0;
  /// Objective after every accepted iteration, starting with the initial point.
  std::vector<double> trace;
};

/// Projected damped Newton on segment_loss over [begin, end) inside the
/// model's box: full second-order steps, Levenberg ridge when the Hessian is
/// not positive definite, step halving until the objective does not increase.
/// Stops when the projected gradient norm drops below `tol` or after
/// `max_iter` iterations; `converged` reports which.
MinimizeResult exact_minimize(const CostModel& model, Index begin, Index end, const Vector& start,
                              int max_iter = 500, double tol = 1e-9);
MinimizeResult exact_minimize(const CostModel& model, Index begin, Index end);

/// Raw penalized DP over every tau without pruning, using exact costs.
struct DpSolution {
  std::vector<Index> cps;       // model row axis
  std::vector<double> F;        // F(0..T)
  double objective = kInf;
};
DpSolution dp_exhaustive_raw(const CostModel& model, const PenaltySpec& penalty);

/// Exhaustive DP followed by the same per-segment reporting as detect()
/// (no trimming). Intended for T <= 200.
DetectionResult dp_exhaustive(const CostModel& model, const PenaltySpec& penalty, bool cp_only = false);

}  // namespace seqcpd
