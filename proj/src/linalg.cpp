#include "seqcpd/linalg.hpp"

#include <cmath>

namespace seqcpd {

std::optional<Eigen::LLT<Matrix>> spd_factor(const Matrix& a) {
  if (a.rows() == 0 || !a.allFinite()) return std::nullopt;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Vector pivots = llt.matrixLLT().diagonal();
  const double hi = pivots.maxCoeff();
  const double lo = pivots.minCoeff();
  if (!(lo > 0.0) || lo * lo < 1e-12 * hi * hi) return std::nullopt;
  return llt;
}

std::optional<Vector> solve_spd(const Matrix& a, const Vector& b) {
  auto llt = spd_factor(a);
  if (!llt) return std::nullopt;
  return Vector(llt->solve(b));
}

double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void project_box(Vector& theta, const Vector& lower, const Vector& upper) {
  theta = theta.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace seqcpd
