#pragma once

#include "seqcpd/types.hpp"

#include <optional>
#include <vector>

namespace seqcpd {

struct DetectionResult {
  /// Strictly increasing change points on the original time axis.
  std::vector<Index> cp_set;
  /// Unadjusted exact cost of each final segment.
  std::vector<double> cost_values;
  std::vector<Vector> thetas;
  /// One value per row that contributed to a fit; empty when cp_only.
  std::optional<Vector> residuals;
  /// Penalized objective F(T) of the optimal segmentation before trimming.
  double objective = kInf;
  /// Change points before trim post-processing, original time axis.
  std::vector<Index> raw_cp_set;
};

}  // namespace seqcpd
