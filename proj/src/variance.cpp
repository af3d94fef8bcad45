#include "seqcpd/variance.hpp"

#include "seqcpd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace seqcpd {

Matrix rice_mean(const Matrix& series) {
  const Index t = series.rows();
  if (t < 2) throw InvalidConfig("Rice estimator needs at least 2 rows");
  const Matrix diff = series.bottomRows(t - 1) - series.topRows(t - 1);
  return diff.transpose() * diff / (2.0 * static_cast<double>(t - 1));
}

Index default_grice_window(Index d) { return std::max<Index>(d + 2, 5); }

namespace {

struct Window {
  Matrix gram;
  Matrix inverse;
  Matrix coef;
};

std::optional<Window> fit_window(const Matrix& x, const Matrix& y, Index start, Index m) {
  Window w;
  const auto xs = x.middleRows(start, m);
  w.gram = xs.transpose() * xs;
  auto llt = spd_factor(w.gram);
  if (!llt) return std::nullopt;
  w.inverse = llt->solve(Matrix::Identity(x.cols(), x.cols()));
  w.coef = llt->solve(xs.transpose() * y.middleRows(start, m));
  return w;
}

Matrix grice_core(const Matrix& x, const Matrix& y, Index m) {
  const Index t = x.rows();
  const Index d = x.cols();
  const Index r = y.cols();
  if (m < d) throw InvalidConfig("generalized Rice window must be at least the covariate count");
  if (t < m + 1) throw InvalidConfig("generalized Rice needs T >= M + 1");

  const Index windows = t - m;
  Index skipped = 0;
  Matrix total = Matrix::Zero(r, r);
  std::optional<Window> cur = fit_window(x, y, 0, m);
  for (Index s = 0; s < windows; ++s) {
    std::optional<Window> next = fit_window(x, y, s + 1, m);
    bool used = false;
    if (cur && next) {
      const Vector xs = x.row(s).transpose();
      const Matrix inner = cur->gram - xs * xs.transpose();
      const Matrix c = cur->inverse * inner * next->inverse;
      const double denom = (next->inverse + cur->inverse - 2.0 * c).trace();
      if (denom > 0.0 && std::isfinite(denom)) {
        const Matrix delta = next->coef - cur->coef;
        total += delta.transpose() * delta / denom;
        used = true;
      }
    }
    if (!used) ++skipped;
    cur = std::move(next);
  }
  if (5 * skipped > windows)
    throw DegenerateSegment("generalized Rice: " + std::to_string(skipped) + " of " + std::to_string(windows) +
                            " windows singular");
  return total / static_cast<double>(windows - skipped);
}

}  // namespace

double grice_lm(const Matrix& x, const Vector& y, Index window) {
  if (x.rows() != y.rows()) throw InvalidConfig("design and response lengths differ");
  return grice_core(x, y, window)(0, 0);
}

double grice_lm(const SeriesData& labeled, Index window) {
  if (labeled.role() != DataRole::labeled) throw InvalidConfig("generalized Rice needs labeled data");
  const Matrix& v = labeled.values();
  return grice_lm(v.rightCols(v.cols() - 1), v.col(0), window);
}

Matrix grice_multi(const Matrix& x, const Matrix& y, Index window) {
  if (x.rows() != y.rows()) throw InvalidConfig("design and response lengths differ");
  return grice_core(x, y, window);
}

double laplace_rice(const Vector& series) {
  const Index t = series.size();
  if (t < 2) throw InvalidConfig("Rice estimator needs at least 2 rows");
  const double abs_sum = (series.tail(t - 1) - series.head(t - 1)).cwiseAbs().sum();
  const double scale = 2.0 / (3.0 * static_cast<double>(t - 1)) * abs_sum;
  return 2.0 * scale * scale;
}

}  // namespace seqcpd
