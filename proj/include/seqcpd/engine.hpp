#pragma once

#include "seqcpd/cost_model.hpp"
#include "seqcpd/penalties.hpp"
#include "seqcpd/result.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace seqcpd {

/// Extra epochs as a function of segment length: the first entry whose
/// threshold exceeds the length wins; no match means zero.
struct EpochRule {
  std::vector<std::pair<Index, int>> below;  // (threshold, W)

  int epochs_for(Index segment_length) const;
  /// Parses "lt:<len>=<w>[,lt:<len>=<w>...]"; an empty string gives the default rule.
  static EpochRule parse(std::string_view text);
};

int epochs_for(Index segment_length, const EpochRule& rule);

enum class LineSearchMode { whole_segment, newest_point };

/// When the newest point's Hessian enters the preconditioner: before the step
/// (evaluated at the current iterate) or after it (at the updated iterate).
enum class PrecondUpdate { before_step, after_step };

struct DetectorConfig {
  PenaltyChoice penalty;
  double trim = 0.02;
  Index segment_count = 10;
  /// Falls back to the family default when unset.
  std::optional<double> vanilla_percentage;
  EpochRule epochs;
  std::vector<double> line_search{1.0};
  LineSearchMode line_search_mode = LineSearchMode::whole_segment;
  PrecondUpdate precond_update = PrecondUpdate::before_step;
  /// Initial preconditioner is this many rows' worth of the block's average curvature.
  double prior_weight = 5.0;
  std::optional<Vector> lower;
  std::optional<Vector> upper;
  double epsilon = 1e-10;
  double momentum_coef = 0.0;
  bool warm_start = false;
  bool cp_only = false;
  bool pruning = true;
  /// Worker count for per-candidate work; 0 uses the OpenMP default.
  int threads = 0;

  /// Throws InvalidConfig on violated invariants.
  void validate() const;
};

/// SeGD state of one candidate segment start. The segment covers rows
/// [tau, tau + absorbed).
struct CandidateState {
  Index tau = 0;
  Index absorbed = 0;
  Vector theta;
  Matrix precond;
  Vector theta_sum;
  int epochs_done = 0;
  Vector momentum;
  /// Iterate before the proximal map; empty for models without one.
  Vector smooth;
  /// (precond + eps I)^{-1}, kept current by Sherman-Morrison for rank-one Hessians.
  Matrix precond_inv;
  bool inv_valid = false;
  Index since_refresh = 0;

  Index end() const { return tau + absorbed; }
};

/// Starts a state at row tau with the given parameter and preconditioner.
CandidateState make_state(const CostModel& model, Index tau, const Vector& theta0, const Matrix& h0,
                          const DetectorConfig& config);

/// Absorbs row state.end() with one projected quasi-Newton step.
void segd_step(CandidateState& state, const CostModel& model, const DetectorConfig& config);

/// Sum of losses over the state's segment at theta_sum / absorbed, plus the
/// model's segment penalty.
double approx_cost(const CandidateState& state, const CostModel& model);

/// Approximate cost after `epochs` extra passes started from the state's
/// current (theta, precond); the state itself is not modified.
double approx_cost_with_epochs(const CandidateState& state, const CostModel& model, const DetectorConfig& config,
                               int epochs);

/// F(tau) + cost + adjustment(length) + beta, evaluated in one fixed order.
double candidate_value(double f_tau, double cost, const PenaltySpec& penalty, Index length);

/// Keeps tau when F(tau) + cost + c0 <= F(t); the newest candidate t-1 is always kept.
std::vector<Index> prune(const std::vector<Index>& candidates, const std::vector<double>& F,
                         const std::vector<double>& seg_costs, double c0, Index t);

/// Change points from the argmin table (last[t] = optimal last change point before t).
std::vector<Index> backtrack(const std::vector<Index>& last, Index T);

/// Drops change points within ceil(trim T) of either end and merges closer pairs.
std::vector<Index> trim_change_points(const CostModel& model, std::vector<Index> cps, double trim);

/// Exact per-segment costs, parameters and residuals for a segmentation on
/// the model's row axis; change points are shifted to the original axis.
DetectionResult report_segments(const CostModel& model, const std::vector<Index>& cps, bool cp_only);

/// Penalized segmentation with PELT pruning and SeGD cost approximation.
DetectionResult detect(const DetectorConfig& config, const CostModel& model);

/// Penalty for the model under the configured choice.
PenaltySpec resolve_for(const DetectorConfig& config, const CostModel& model);

}  // namespace seqcpd
