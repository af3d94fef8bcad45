#pragma once

#include "seqcpd/series.hpp"

namespace seqcpd {

/// First-difference estimate of the noise covariance: sum of dz dz^T / (2(T-1)).
Matrix rice_mean(const Matrix& series);

/// Default sliding window for the generalized Rice estimator.
Index default_grice_window(Index d);

/// Generalized Rice estimate of the noise variance of y = x^T theta + e, with
/// theta allowed to change. Averages per-window estimates over T - M windows;
/// windows with a singular Gram matrix are skipped. Throws DegenerateSegment
/// when more than 20% of the windows are skipped.
double grice_lm(const Matrix& x, const Vector& y, Index window);
double grice_lm(const SeriesData& labeled, Index window);

/// Multi-response version: the (j, k) entry averages the inner product of the
/// coefficient differences of responses j and k over the same trace.
Matrix grice_multi(const Matrix& x, const Matrix& y, Index window);

/// 2 * (2/(3(T-1)) * sum |x_{t+1} - x_t|)^2, for Laplace noise.
double laplace_rice(const Vector& series);

}  // namespace seqcpd
