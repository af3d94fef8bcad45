#pragma once

#include "seqcpd/datagen.hpp"
#include "seqcpd/types.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace seqcpd::test {

inline Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

inline Matrix gaussian_matrix(Rng& rng, Index rows, Index cols, double sd = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, sd);
  return m;
}

/// Univariate series with piecewise-constant mean; `levels` holds one level per segment.
inline Matrix piecewise_mean(Rng& rng, const std::vector<Index>& lengths, const std::vector<double>& levels,
                             double sd = 1.0) {
  Index T = 0;
  for (Index n : lengths) T += n;
  Matrix m(T, 1);
  Index row = 0;
  for (std::size_t k = 0; k < lengths.size(); ++k)
    for (Index i = 0; i < lengths[k]; ++i) m(row++, 0) = levels[k] + rng.normal(0.0, sd);
  return m;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

inline bool all_close(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (rel_diff(a(i, j), b(i, j)) > tol) return false;
  return true;
}

/// Central finite-difference gradient of f at x.
template <class F>
Vector fd_gradient(F&& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Vector a = x, b = x;
    const double step = h * std::max(1.0, std::abs(x(k)));
    a(k) += step;
    b(k) -= step;
    g(k) = (f(a) - f(b)) / (2.0 * step);
  }
  return g;
}

/// Central finite-difference Jacobian of a vector function.
template <class F>
Matrix fd_jacobian(F&& f, const Vector& x, double h = 1e-6) {
  const Vector f0 = f(x);
  Matrix j(f0.size(), x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Vector a = x, b = x;
    const double step = h * std::max(1.0, std::abs(x(k)));
    a(k) += step;
    b(k) -= step;
    j.col(k) = (f(a) - f(b)) / (2.0 * step);
  }
  return j;
}

/// Largest entrywise error relative to the largest entry of the reference.
inline double scaled_error(const Matrix& got, const Matrix& ref) {
  const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
  return (got - ref).cwiseAbs().maxCoeff() / scale;
}

}  // namespace seqcpd::test
