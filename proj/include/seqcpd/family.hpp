#pragma once

#include "seqcpd/engine.hpp"
#include "seqcpd/series.hpp"
#include "seqcpd/timeseries.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace seqcpd {

/// Built-in family and its model-specific knobs.
struct FamilySpec {
  /// mean, variance, meanvariance, median, lm, binomial, poisson, lasso, ar, arma, var, huber.
  std::string family = "mean";
  /// Model order: p for ar/var, (p, q) for arma.
  std::vector<Index> order;
  std::optional<double> theta_l1_bound;
  double huber_delta = 1.0;
  ArmaVariance arma_variance = ArmaVariance::joint;
};

std::vector<std::string> family_ids();

/// How the family reads the columns of its input.
DataRole role_for(const std::string& family);

/// Builds the model for `values` and applies any configured bounds.
std::unique_ptr<CostModel> make_model(const FamilySpec& spec, const Matrix& values,
                                      const DetectorConfig& config = {});

DetectionResult detect(const DetectorConfig& config, const FamilySpec& spec, const Matrix& values);

}  // namespace seqcpd
