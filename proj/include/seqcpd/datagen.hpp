#pragma once

#include "seqcpd/custom.hpp"
#include "seqcpd/series.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace seqcpd {

/// splitmix64 finalizer, used to derive engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// mt19937_64 seeded with splitmix64(seed + stream * 0x9E3779B97F4A7C15).
/// Normal draws use Box-Muller on 53-bit uniforms (the second value is
/// cached), so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double a, double b);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Laplace(0, b).
  double laplace(double b);
  /// Inversion below lambda 10, PTRS (Hormann 1993) above.
  std::int64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

struct Generated {
  std::string dgp;
  /// Detection family and order that match the generator.
  std::string family;
  Index p = 0;
  Index q = 0;
  Matrix values;
  DataRole role = DataRole::unlabeled;
  /// Change points on the original time axis (first index of each new segment, 0-based).
  std::vector<Index> true_cps;
  /// One parameter vector per segment, in the family's parameter layout
  /// (variance: column-major covariance; var: vec of the stacked coefficients).
  std::vector<Vector> true_params;

  SeriesData series() const { return SeriesData(values, role); }
};

/// Recognized ids: mean, variance, meanvariance, lm, grice, lasso,
/// small_lasso, binomial, poisson, ar3, arma32, var2, huber.
std::vector<std::string> dgp_ids();

/// Deterministic for a fixed (dgp, seed). Substream 0 drives covariates and
/// noise, substream 1 drives random segment parameters.
Generated generate(std::string_view dgp, std::uint64_t seed);

/// Huber loss rho_delta(u).
double huber_rho(double u, double delta);

/// Huber regression callbacks for a labeled block (column 0 response). The
/// Hessian is x x^T inside the quadratic zone and zero outside.
CustomFunctions huber_functions(Index covariates, double delta);

std::unique_ptr<CustomModel> huber_model(SeriesData labeled, double delta = 1.0);

}  // namespace seqcpd
