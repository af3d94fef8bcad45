#pragma once

#include "seqcpd/types.hpp"

#include <optional>
#include <string_view>

namespace seqcpd {

enum class Criterion { bic, mbic, mdl, manual };
enum class AdjustmentKind { none, mbic, mdl };

/// User-facing penalty choice. `beta` is only read for Criterion::manual.
struct PenaltyChoice {
  Criterion criterion = Criterion::mbic;
  double beta = 0.0;
  std::optional<AdjustmentKind> adjustment;  // defaults follow the criterion
  std::optional<double> pruning_base;        // defaults to the family's c0
};

/// Penalty resolved for a concrete parameter dimension and series length.
struct PenaltySpec {
  Criterion criterion = Criterion::mbic;
  double beta = 0.0;
  AdjustmentKind adjustment = AdjustmentKind::none;
  double pruning_base = 0.0;
  Index d_p = 1;
  Index T = 2;

  /// Adjustment added to the cost of a segment of the given length.
  double adjust(Index seg_len) const;
  /// c0 including the criterion's pruning adjustment.
  double pruning() const;
};

double beta_value(Criterion criterion, Index d_p, Index T);
double cost_adjustment(AdjustmentKind kind, Index seg_len, Index T, Index d_p);
double pruning_constant(AdjustmentKind kind, Index d_p, double c0_base);

PenaltySpec resolve_penalty(const PenaltyChoice& choice, Index d_p, Index T, double family_c0);

Criterion parse_criterion(std::string_view name);
AdjustmentKind parse_adjustment(std::string_view name);

}  // namespace seqcpd
