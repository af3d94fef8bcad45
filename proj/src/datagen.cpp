#include "seqcpd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seqcpd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Vector normal_vector(Rng& rng, Index d, double mean = 0.0, double sd = 1.0) {
  Vector v(d);
  for (Index k = 0; k < d; ++k) v(k) = rng.normal(mean, sd);
  return v;
}

/// Index of the segment containing row t given change points (first rows of new segments).
std::size_t segment_of(Index t, const std::vector<Index>& cps) {
  std::size_t k = 0;
  while (k < cps.size() && t >= cps[k]) ++k;
  return k;
}

Generated gaussian_mean() {
  Generated g;
  g.family = "mean";
  g.true_cps = {300, 700};
  g.true_params = {vec3(0, 0, 0), vec3(50, 50, 50), vec3(2, 2, 2)};
  return g;
}

Generated make_mean(std::uint64_t seed) {
  Generated g = gaussian_mean();
  Rng rng(seed, 0);
  const Index T = 1000;
  g.values.resize(T, 3);
  for (Index t = 0; t < T; ++t) {
    const Vector& mu = g.true_params[segment_of(t, g.true_cps)];
    for (Index k = 0; k < 3; ++k) g.values(t, k) = mu(k) + 10.0 * rng.normal();
  }
  return g;
}

Generated make_variance(std::uint64_t seed) {
  Generated g;
  g.family = "variance";
  g.true_cps = {300, 700};
  Rng rng(seed, 0);
  Rng prng(seed, 1);
  const Index T = 1000;
  const Index d = 3;
  std::vector<Matrix> roots;
  for (int i = 0; i < 3; ++i) {
    Matrix s(d, d);
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k) s(j, k) = prng.uniform(-1.0, 1.0);
    roots.push_back(s.transpose());
    g.true_params.push_back(flatten(s.transpose() * s));
  }
  g.values.resize(T, d);
  for (Index t = 0; t < T; ++t) g.values.row(t) = (roots[segment_of(t, g.true_cps)] * normal_vector(rng, d)).transpose();
  return g;
}

Generated make_meanvariance(std::uint64_t seed) {
  Generated g;
  g.family = "meanvariance";
  g.true_cps = {300, 700, 1000, 1300, 1700};
  const double means[] = {0, 10, 0, 0, 10, 10};
  const double sds[] = {1, 1, 10, 1, 1, 10};
  for (int i = 0; i < 6; ++i) {
    Vector p(8);
    p << Vector::Constant(4, means[i]), Vector::Constant(4, sds[i] * sds[i]);
    g.true_params.push_back(p);
  }
  Rng rng(seed, 0);
  const Index T = 2000;
  g.values.resize(T, 4);
  for (Index t = 0; t < T; ++t) {
    const std::size_t s = segment_of(t, g.true_cps);
    for (Index k = 0; k < 4; ++k) g.values(t, k) = means[s] + sds[s] * rng.normal();
  }
  return g;
}

Generated linear_series(std::uint64_t seed, Index T, const std::vector<Index>& cps, const std::vector<Vector>& thetas,
                        double noise_sd) {
  Generated g;
  g.role = DataRole::labeled;
  g.true_cps = cps;
  g.true_params = thetas;
  const Index d = thetas.front().size();
  Rng rng(seed, 0);
  g.values.resize(T, d + 1);
  for (Index t = 0; t < T; ++t) {
    const Vector x = normal_vector(rng, d);
    g.values(t, 0) = x.dot(thetas[segment_of(t, cps)]) + noise_sd * rng.normal();
    g.values.row(t).tail(d) = x.transpose();
  }
  return g;
}

Generated make_lm(std::uint64_t seed) {
  Generated g = linear_series(seed, 300, {100, 200}, {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0),
                                                      Vector::Constant(1, 0.5)}, 1.0);
  g.family = "lm";
  return g;
}

Generated make_grice(std::uint64_t seed) {
  Generated g = linear_series(seed, 1000, {300, 700}, {vec3(10, 1.2, -1), vec3(-1, 8, 0.5), vec3(0.5, -3, 0.2)}, 10.0);
  g.family = "lm";
  return g;
}

Generated make_lasso(std::uint64_t seed, Index T, Index d, const std::vector<Index>& cps) {
  Rng prng(seed, 1);
  const double ranges[4][2] = {{-5, -2}, {-3, 3}, {2, 5}, {-5, 5}};
  std::vector<Vector> thetas;
  for (std::size_t s = 0; s <= cps.size(); ++s) {
    Vector th = Vector::Zero(d);
    for (Index k = 0; k < 5; ++k) th(k) = prng.uniform(ranges[s % 4][0], ranges[s % 4][1]);
    thetas.push_back(th);
  }
  Generated g = linear_series(seed, T, cps, thetas, 1.0);
  g.family = "lasso";
  return g;
}

Generated make_binomial(std::uint64_t seed) {
  Rng prng(seed, 1);
  const Vector t1 = normal_vector(prng, 4, 0.0);
  const Vector t2 = normal_vector(prng, 4, 2.0);
  Generated g;
  g.family = "binomial";
  g.role = DataRole::labeled;
  g.true_cps = {300};
  g.true_params = {t1, t2};
  Rng rng(seed, 0);
  const Index T = 500;
  g.values.resize(T, 5);
  for (Index t = 0; t < T; ++t) {
    const Vector x = normal_vector(rng, 4);
    const double eta = x.dot(g.true_params[segment_of(t, g.true_cps)]);
    g.values(t, 0) = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0;
    g.values.row(t).tail(4) = x.transpose();
  }
  return g;
}

Generated make_poisson(std::uint64_t seed) {
  Rng prng(seed, 1);
  const Vector theta0 = vec3(1.0, 0.3, -1.0);
  const Vector delta = normal_vector(prng, 3);
  Generated g;
  g.family = "poisson";
  g.role = DataRole::labeled;
  g.true_cps = {500, 800, 1000};
  g.true_params = {theta0, theta0 + delta, theta0, theta0 - delta};
  Rng rng(seed, 0);
  const Index T = 1100;
  g.values.resize(T, 4);
  for (Index t = 0; t < T; ++t) {
    const Vector x = normal_vector(rng, 3);
    const double eta = x.dot(g.true_params[segment_of(t, g.true_cps)]);
    g.values(t, 0) = static_cast<double>(rng.poisson(std::exp(eta)));
    g.values.row(t).tail(3) = x.transpose();
  }
  return g;
}

Generated make_ar3(std::uint64_t seed) {
  Generated g;
  g.family = "ar";
  g.p = 3;
  g.true_cps = {600};
  g.true_params = {vec3(0.6, -0.2, 0.1), vec3(0.3, 0.4, 0.2)};
  Rng rng(seed, 0);
  const Index T = 1000;
  g.values = Matrix::Zero(T, 1);
  for (Index t = 0; t < T; ++t) {
    const Vector& phi = g.true_params[segment_of(t, g.true_cps)];
    double x = 3.0 * rng.normal();
    for (Index k = 0; k < 3; ++k)
      if (t - 1 - k >= 0) x += phi(k) * g.values(t - 1 - k, 0);
    g.values(t, 0) = x;
  }
  return g;
}

Generated make_arma32(std::uint64_t seed) {
  Generated g;
  g.family = "arma";
  g.p = 3;
  g.q = 2;
  g.true_cps = {200};
  Vector a(6), b(6);
  a << 0.1, -0.3, 0.1, 0.1, 0.5, 1.0;
  b << 0.3, 0.1, -0.3, -0.6, -0.1, 1.0;
  g.true_params = {a, b};
  Rng rng(seed, 0);
  const Index T = 300;
  g.values = Matrix::Zero(T, 1);
  std::vector<double> eps(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    const Vector& th = g.true_params[segment_of(t, g.true_cps)];
    eps[static_cast<std::size_t>(t)] = rng.normal();
    double x = eps[static_cast<std::size_t>(t)];
    for (Index k = 0; k < 3; ++k)
      if (t - 1 - k >= 0) x += th(k) * g.values(t - 1 - k, 0);
    for (Index k = 0; k < 2; ++k)
      if (t - 1 - k >= 0) x += th(3 + k) * eps[static_cast<std::size_t>(t - 1 - k)];
    g.values(t, 0) = x;
  }
  return g;
}

Generated make_var2(std::uint64_t seed) {
  Matrix a1(2, 2), a2(2, 2), b1(2, 2), b2(2, 2);
  a1 << -0.3, -0.5, 0.6, 0.4;
  a2 << 0.2, 0.2, 0.2, -0.2;
  b1 << 0.3, 0.1, -0.4, -0.5;
  b2 << -0.5, -0.5, -0.2, 0.2;
  std::vector<Matrix> coef;
  for (const auto* pair : {&a1, &b1}) {
    Matrix c(2, 4);
    c << *pair, (pair == &a1 ? a2 : b2);
    coef.push_back(c);
  }
  Generated g;
  g.family = "var";
  g.p = 2;
  g.true_cps = {200};
  for (const Matrix& c : coef) g.true_params.push_back(flatten(c.transpose()));
  Rng rng(seed, 0);
  const Index T = 300;
  g.values = Matrix::Zero(T, 2);
  for (Index t = 0; t < T; ++t) {
    const Matrix& c = coef[segment_of(t, g.true_cps)];
    Vector x = normal_vector(rng, 2);
    for (Index k = 0; k < 2; ++k)
      if (t - 1 - k >= 0) x += c.middleCols(2 * k, 2) * g.values.row(t - 1 - k).transpose();
    g.values.row(t) = x.transpose();
  }
  return g;
}

Generated make_huber(std::uint64_t seed) {
  Rng prng(seed, 1);
  Vector m2 = Vector::Zero(5), m3 = Vector::Zero(5);
  m2.head(2).setConstant(5.0);
  m3.head(2).setConstant(9.0);
  std::vector<Vector> thetas{normal_vector(prng, 5), m2 + normal_vector(prng, 5), m3 + normal_vector(prng, 5)};
  Generated g;
  g.family = "huber";
  g.role = DataRole::labeled;
  g.true_cps = {400, 700};
  g.true_params = thetas;
  Rng rng(seed, 0);
  const Index T = 1000;
  g.values.resize(T, 6);
  for (Index t = 0; t < T; ++t) {
    const Vector x = normal_vector(rng, 5);
    double y = x.dot(thetas[segment_of(t, g.true_cps)]) + rng.normal();
    if (rng.bernoulli(0.05)) y = -y;
    g.values(t, 0) = y;
    g.values.row(t).tail(5) = x.transpose();
  }
  return g;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed + stream * kGolden)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

double Rng::laplace(double b) {
  const double u = uniform() - 0.5;
  return -b * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

std::int64_t Rng::poisson(double lambda) {
  if (!(lambda > 0.0)) return 0;
  if (lambda < 10.0) {
    double p = std::exp(-lambda);
    double s = p;
    const double u = uniform();
    std::int64_t k = 0;
    while (u > s && k < 10000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      s += p;
    }
    return k;
  }
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -lambda + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(k);
  }
}

std::vector<std::string> dgp_ids() {
  return {"mean",   "variance", "meanvariance", "lm",   "grice",  "lasso", "small_lasso",
          "binomial", "poisson", "ar3",         "arma32", "var2", "huber"};
}

Generated generate(std::string_view dgp, std::uint64_t seed) {
  Generated g;
  if (dgp == "mean") g = make_mean(seed);
  else if (dgp == "variance") g = make_variance(seed);
  else if (dgp == "meanvariance") g = make_meanvariance(seed);
  else if (dgp == "lm") g = make_lm(seed);
  else if (dgp == "grice") g = make_grice(seed);
  else if (dgp == "lasso") g = make_lasso(seed, 480, 50, {80, 200, 320});
  else if (dgp == "small_lasso") g = make_lasso(seed, 260, 40, {65, 130, 195});
  else if (dgp == "binomial") g = make_binomial(seed);
  else if (dgp == "poisson") g = make_poisson(seed);
  else if (dgp == "ar3") g = make_ar3(seed);
  else if (dgp == "arma32") g = make_arma32(seed);
  else if (dgp == "var2") g = make_var2(seed);
  else if (dgp == "huber") g = make_huber(seed);
  else throw UnknownDgp("unknown dgp '" + std::string(dgp) + "'");
  g.dgp = std::string(dgp);
  return g;
}

double huber_rho(double u, double delta) {
  const double a = std::abs(u);
  return a <= delta ? 0.5 * u * u : delta * a - 0.5 * delta * delta;
}

CustomFunctions huber_functions(Index covariates, double delta) {
  if (!(delta > 0.0)) throw InvalidConfig("--huber-delta must be positive");
  CustomFunctions f;
  f.name = "huber";
  f.param_dim = covariates;
  f.loss = [delta](const RowBlock& z, const Vector& theta) {
    const Vector r = z.col(0) - z.rightCols(theta.size()) * theta;
    double total = 0.0;
    for (Index i = 0; i < r.size(); ++i) total += huber_rho(r(i), delta);
    return total;
  };
  f.gradient = [delta](const RowBlock& z, const Vector& theta) {
    const auto x = z.rightCols(theta.size());
    const Vector r = z.col(0) - x * theta;
    const Vector psi = r.unaryExpr([delta](double u) { return std::clamp(u, -delta, delta); });
    return Vector(-(x.transpose() * psi));
  };
  f.hessian = [delta](const RowBlock& z, const Vector& theta) {
    const auto x = z.rightCols(theta.size());
    const Vector r = z.col(0) - x * theta;
    Matrix h = Matrix::Zero(theta.size(), theta.size());
    for (Index i = 0; i < r.size(); ++i)
      if (std::abs(r(i)) <= delta) h.noalias() += x.row(i).transpose() * x.row(i);
    return h;
  };
  return f;
}

std::unique_ptr<CustomModel> huber_model(SeriesData labeled, double delta) {
  if (labeled.role() != DataRole::labeled) throw InvalidConfig("huber needs labeled data (response in column 0)");
  const Index d = labeled.cols() - 1;
  return std::make_unique<CustomModel>(std::move(labeled), huber_functions(d, delta));
}

}  // namespace seqcpd
