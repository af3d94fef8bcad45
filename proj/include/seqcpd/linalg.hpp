#pragma once

#include "seqcpd/types.hpp"

#include <optional>

namespace seqcpd {

/// Cholesky factor of a symmetric matrix, rejected when it is not numerically
/// positive definite (smallest pivot below 1e-12 of the largest, squared).
std::optional<Eigen::LLT<Matrix>> spd_factor(const Matrix& a);

/// Solves a x = b for symmetric positive definite a. Empty when a is singular.
std::optional<Vector> solve_spd(const Matrix& a, const Vector& b);

/// log|a| from a Cholesky factor.
double log_det(const Eigen::LLT<Matrix>& llt);

/// Clamps each component of theta into [lower, upper].
void project_box(Vector& theta, const Vector& lower, const Vector& upper);

}  // namespace seqcpd
