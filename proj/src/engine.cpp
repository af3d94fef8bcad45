#include "seqcpd/engine.hpp"

#include "seqcpd/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqcpd {

namespace {

constexpr Index kNever = std::numeric_limits<Index>::max();
constexpr Index kRefreshEvery = 1000;

std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim_ws(s);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

Vector bound_or(const std::optional<Vector>& configured, const Vector& fallback) {
  return configured ? *configured : fallback;
}

void refresh_inverse(CandidateState& s, double eps) {
  if (!s.inv_valid || s.since_refresh >= kRefreshEvery) {
    Matrix a = s.precond;
    a.diagonal().array() += eps;
    const Index d = a.rows();
    if (auto llt = spd_factor(a)) {
      s.precond_inv = llt->solve(Matrix::Identity(d, d));
    } else {
      Eigen::LDLT<Matrix> ldlt(a);
      if (ldlt.info() != Eigen::Success) throw DegenerateSegment("preconditioner is singular even with ridge");
      s.precond_inv = ldlt.solve(Matrix::Identity(d, d));
    }
    if (!s.precond_inv.allFinite()) throw DegenerateSegment("preconditioner is singular even with ridge");
    s.inv_valid = true;
    s.since_refresh = 0;
  }
}

void absorb_hessian(CandidateState& s, const CostModel& model, Index j) {
  double w = 0.0;
  Vector u;
  if (model.point_hessian_rank_one(s.tau, j, s.theta, w, u)) {
    s.precond.noalias() += w * u * u.transpose();
    if (s.inv_valid) {
      const Vector v = s.precond_inv * u;
      const double denom = 1.0 + w * u.dot(v);
      if (std::isfinite(denom) && denom > 1e-12) {
        s.precond_inv.noalias() -= (w / denom) * v * v.transpose();
        ++s.since_refresh;
      } else {
        s.inv_valid = false;
      }
    }
  } else {
    s.precond += model.point_information(s.tau, j, s.theta);
    s.inv_valid = false;
  }
}

struct Candidate {
  Index tau = 0;
  Index block = 0;
  Vector theta0;
  std::unique_ptr<CandidateState> state;
  Index expire = kNever;
  double cost = kInf;
  bool evaluated = false;
};

struct BlockInit {
  Vector theta;
  Matrix h0;
};

Matrix stabilized_h0(Matrix h, double eps) {
  const Index d = h.rows();
  if (!h.allFinite()) return Matrix::Identity(d, d);
  h = 0.5 * (h + h.transpose());
  double scale = h.diagonal().cwiseAbs().mean();
  if (!std::isfinite(scale) || scale <= 0.0) scale = 1.0;
  double ridge = 0.0;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Matrix a = h;
    a.diagonal().array() += ridge + eps;
    if (spd_factor(a)) {
      h.diagonal().array() += ridge;
      return h;
    }
    ridge = ridge == 0.0 ? 1e-8 * scale : ridge * 10.0;
  }
  return scale * Matrix::Identity(d, d);
}

std::vector<BlockInit> block_inits(const CostModel& model, const DetectorConfig& config, const Vector& lo,
                                   const Vector& hi) {
  const Index T = model.size();
  const Index d = model.param_dim();
  const Index K = std::clamp<Index>(config.segment_count, 1, T);
  std::vector<BlockInit> out;
  out.reserve(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    const Index b = k * T / K;
    const Index e = (k + 1) * T / K;
    Vector theta;
    try {
      SegmentFit f = model.fit(b, e);
      theta = std::move(f.theta);
    } catch (const Error&) {
    }
    if (theta.size() != d || !theta.allFinite()) theta = model.initial_guess(b, e);
    project_box(theta, lo, hi);
    Matrix h = model.segment_information(b, e, theta) * (config.prior_weight / static_cast<double>(e - b));
    out.push_back({theta, stabilized_h0(std::move(h), config.epsilon)});
  }
  return out;
}

double finite_or_inf(double x) { return std::isnan(x) ? kInf : x; }

double segment_cost_or_inf(const CostModel& model, Index b, Index e) {
  if (e - b < model.min_segment_length() || !model.has_exact_cost()) return kInf;
  try {
    return finite_or_inf(model.exact_cost(b, e));
  } catch (const Error&) {
    return kInf;
  }
}

}  // namespace

int EpochRule::epochs_for(Index segment_length) const {
  for (const auto& [threshold, w] : below)
    if (segment_length < threshold) return w;
  return 0;
}

EpochRule EpochRule::parse(std::string_view text) {
  EpochRule rule;
  text = trim_ws(text);
  if (text.empty()) return rule;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    std::string_view item = trim_ws(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view() : text.substr(comma + 1);
    const std::size_t eq = item.find('=');
    if (item.substr(0, 3) != "lt:" || eq == std::string_view::npos)
      throw InvalidConfig("--epochs-rule entries must look like lt:<len>=<w>, got '" + std::string(item) + "'");
    Index threshold = 0;
    int w = 0;
    if (!parse_number(item.substr(3, eq - 3), threshold) || threshold < 1)
      throw InvalidConfig("--epochs-rule length must be a positive integer in '" + std::string(item) + "'");
    if (!parse_number(item.substr(eq + 1), w) || w < 0)
      throw InvalidConfig("--epochs-rule epoch count must be a nonnegative integer in '" + std::string(item) + "'");
    rule.below.emplace_back(threshold, w);
  }
  return rule;
}

int epochs_for(Index segment_length, const EpochRule& rule) { return rule.epochs_for(segment_length); }

void DetectorConfig::validate() const {
  if (!(trim >= 0.0 && trim < 0.5)) throw InvalidConfig("--trim must lie in [0, 0.5)");
  if (segment_count < 1) throw InvalidConfig("--segment-count must be a positive integer");
  if (vanilla_percentage && !(*vanilla_percentage >= 0.0 && *vanilla_percentage <= 1.0))
    throw InvalidConfig("--vanilla-percentage must lie in [0, 1]");
  if (line_search.empty()) throw InvalidConfig("--line-search needs at least one step multiplier");
  for (double g : line_search)
    if (!(std::isfinite(g) && g > 0.0)) throw InvalidConfig("--line-search entries must be positive");
  if (lower && upper) {
    if (lower->size() != upper->size()) throw InvalidConfig("--lower and --upper must have the same length");
    if ((lower->array() > upper->array()).any()) throw InvalidConfig("--lower must not exceed --upper");
  }
  if (lower && lower->hasNaN()) throw InvalidConfig("--lower entries must be numbers");
  if (upper && upper->hasNaN()) throw InvalidConfig("--upper entries must be numbers");
  if (!(std::isfinite(epsilon) && epsilon >= 0.0)) throw InvalidConfig("--epsilon must be a finite nonnegative number");
  if (!(std::isfinite(prior_weight) && prior_weight > 0.0)) throw InvalidConfig("--prior-weight must be positive");
  if (!(momentum_coef >= 0.0 && momentum_coef < 1.0)) throw InvalidConfig("--momentum must lie in [0, 1)");
  if (threads < 0) throw InvalidConfig("thread count must be nonnegative");
  for (const auto& [threshold, w] : epochs.below)
    if (threshold < 1 || w < 0) throw InvalidConfig("--epochs-rule needs positive lengths and nonnegative epochs");
}

CandidateState make_state(const CostModel& model, Index tau, const Vector& theta0, const Matrix& h0,
                          const DetectorConfig& config) {
  const Index d = model.param_dim();
  if (theta0.size() != d || h0.rows() != d || h0.cols() != d)
    throw InvalidConfig("initial state does not match the parameter dimension of " + model.name());
  CandidateState s;
  s.tau = tau;
  s.absorbed = 1;
  s.theta = theta0;
  project_box(s.theta, bound_or(config.lower, model.lower()), bound_or(config.upper, model.upper()));
  s.precond = h0;
  s.theta_sum = s.theta;
  s.momentum = Vector::Zero(d);
  if (model.has_proximal()) s.smooth = s.theta;
  return s;
}

void segd_step(CandidateState& s, const CostModel& model, const DetectorConfig& config) {
  const Index j = s.end();
  const Vector& base = s.smooth.size() ? s.smooth : s.theta;
  const Vector g = model.point_gradient(s.tau, j, base);
  if (!g.allFinite()) throw NonFiniteGradient(model.name() + ": non-finite gradient at row " + std::to_string(j));
  if (config.precond_update == PrecondUpdate::before_step) absorb_hessian(s, model, j);
  refresh_inverse(s, config.epsilon);
  Vector dir = -(s.precond_inv * g);
  if (config.momentum_coef > 0.0) {
    dir += config.momentum_coef * s.momentum;
    s.momentum = dir;
  }
  const Vector lo = bound_or(config.lower, model.lower());
  const Vector hi = bound_or(config.upper, model.upper());
  const Vector diag = s.precond.diagonal().array() + config.epsilon;
  Vector best_smooth;
  auto propose = [&](double gamma, Vector& smooth) {
    smooth = base + gamma * dir;
    project_box(smooth, lo, hi);
    Vector cand = smooth;
    model.proximal(s.tau, j + 1, diag, cand);
    return cand;
  };
  Vector best = propose(config.line_search.front(), best_smooth);
  if (config.line_search.size() > 1) {
    auto score = [&](const Vector& cand) {
      if (config.line_search_mode == LineSearchMode::whole_segment)
        return finite_or_inf(model.segment_loss(s.tau, j + 1, cand) + model.segment_penalty(s.tau, j + 1, cand));
      const Vector delta = cand - s.theta;
      return finite_or_inf(model.point_loss(s.tau, j, cand) + 0.5 * delta.dot(s.precond * delta));
    };
    double best_score = score(best);
    for (std::size_t k = 1; k < config.line_search.size(); ++k) {
      Vector smooth;
      Vector cand = propose(config.line_search[k], smooth);
      const double sc = score(cand);
      if (sc < best_score) {
        best_score = sc;
        best = std::move(cand);
        best_smooth = std::move(smooth);
      }
    }
  }
  s.theta = std::move(best);
  if (s.smooth.size()) s.smooth = std::move(best_smooth);
  if (config.precond_update == PrecondUpdate::after_step) absorb_hessian(s, model, j);
  s.theta_sum += s.theta;
  ++s.absorbed;
}

double approx_cost(const CandidateState& s, const CostModel& model) {
  const Vector mean = s.theta_sum / static_cast<double>(s.absorbed);
  return finite_or_inf(model.segment_loss(s.tau, s.end(), mean) + model.segment_penalty(s.tau, s.end(), mean));
}

double approx_cost_with_epochs(const CandidateState& state, const CostModel& model, const DetectorConfig& config,
                               int epochs) {
  if (epochs <= 0) return approx_cost(state, model);
  CandidateState s = state;
  const Index n = state.absorbed;
  for (int w = 0; w < epochs; ++w) {
    s.absorbed = 1;
    s.theta_sum = s.theta;
    while (s.absorbed < n) segd_step(s, model, config);
  }
  return approx_cost(s, model);
}

double candidate_value(double f_tau, double cost, const PenaltySpec& penalty, Index length) {
  return f_tau + (cost + penalty.adjust(length)) + penalty.beta;
}

std::vector<Index> prune(const std::vector<Index>& candidates, const std::vector<double>& F,
                         const std::vector<double>& seg_costs, double c0, Index t) {
  std::vector<Index> kept;
  const double ft = F[static_cast<std::size_t>(t - 1)];
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Index tau = candidates[k];
    if (tau == t - 1) continue;
    const double c = seg_costs[k];
    const bool drop = std::isfinite(c) && F[static_cast<std::size_t>(tau)] + c + c0 > ft;
    if (!drop) kept.push_back(tau);
  }
  kept.push_back(t - 1);
  return kept;
}

std::vector<Index> backtrack(const std::vector<Index>& last, Index T) {
  std::vector<Index> cps;
  Index t = T;
  while (t > 0 && last[static_cast<std::size_t>(t)] > 0) {
    t = last[static_cast<std::size_t>(t)];
    cps.push_back(t);
  }
  std::reverse(cps.begin(), cps.end());
  return cps;
}

std::vector<Index> trim_change_points(const CostModel& model, std::vector<Index> cps, double trim) {
  const Index T = model.size();
  const Index w = static_cast<Index>(std::ceil(trim * static_cast<double>(T) - 1e-9));
  if (w <= 0) return cps;
  std::erase_if(cps, [&](Index c) { return c <= w || T - c <= w; });
  for (;;) {
    std::size_t k = 0;
    while (k + 1 < cps.size() && cps[k + 1] - cps[k] >= w) ++k;
    if (k + 1 >= cps.size()) break;
    const Index prev = k == 0 ? 0 : cps[k - 1];
    const Index next = k + 2 < cps.size() ? cps[k + 2] : T;
    const double keep_left = segment_cost_or_inf(model, prev, cps[k]) + segment_cost_or_inf(model, cps[k], next);
    const double keep_right =
        segment_cost_or_inf(model, prev, cps[k + 1]) + segment_cost_or_inf(model, cps[k + 1], next);
    cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(keep_right < keep_left ? k : k + 1));
  }
  return cps;
}

DetectionResult report_segments(const CostModel& model, const std::vector<Index>& cps, bool cp_only) {
  DetectionResult r;
  const Index offset = model.time_offset();
  const Index T = model.size();
  std::vector<Index> bounds{0};
  for (Index c : cps) {
    bounds.push_back(c);
    r.cp_set.push_back(c + offset);
  }
  bounds.push_back(T);
  std::vector<Vector> residual_parts;
  Index total = 0;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const Index b = bounds[k];
    const Index e = bounds[k + 1];
    if (cp_only) {
      r.cost_values.push_back(model.has_exact_cost() ? finite_or_inf(model.exact_cost(b, e)) : kInf);
      continue;
    }
    SegmentFit f = model.fit(b, e);
    r.cost_values.push_back(finite_or_inf(f.cost));
    Vector res = f.theta.size() == model.param_dim() ? model.residuals(b, e, f.theta) : Vector::Zero(e - b);
    total += res.size();
    residual_parts.push_back(std::move(res));
    r.thetas.push_back(std::move(f.theta));
  }
  if (!cp_only) {
    Vector all(total);
    Index pos = 0;
    for (const Vector& part : residual_parts) {
      all.segment(pos, part.size()) = part;
      pos += part.size();
    }
    r.residuals = std::move(all);
  }
  return r;
}

PenaltySpec resolve_for(const DetectorConfig& config, const CostModel& model) {
  return resolve_penalty(config.penalty, model.param_dim(), model.size(), model.family_pruning_base());
}

DetectionResult detect(const DetectorConfig& config, const CostModel& model) {
  config.validate();
  const Index T = model.size();
  const Index d = model.param_dim();
  const Index m = model.min_segment_length();
  if (T < m) throw InvalidConfig("series of " + std::to_string(T) + " rows is shorter than the minimum segment length " +
                                 std::to_string(m) + " for " + model.name());
  if (config.lower && config.lower->size() != d)
    throw InvalidConfig("--lower needs " + std::to_string(d) + " entries for " + model.name());
  if (config.upper && config.upper->size() != d)
    throw InvalidConfig("--upper needs " + std::to_string(d) + " entries for " + model.name());
  const PenaltySpec penalty = resolve_for(config, model);

  double v = config.vanilla_percentage.value_or(model.default_vanilla());
  if (v < 1.0 && !model.supports_segd()) {
    if (config.vanilla_percentage) throw UnsupportedFamily(model.name() + " has no gradient/Hessian, SeGD (v < 1) is unavailable");
    v = 1.0;
  }
  if (v > 0.0 && !model.has_exact_cost()) throw UnsupportedFamily(model.name() + " has no exact cost");
  const double vT = v * static_cast<double>(T);

  const Vector lo = bound_or(config.lower, model.lower());
  const Vector hi = bound_or(config.upper, model.upper());
  std::vector<BlockInit> blocks;
  const Index K = std::clamp<Index>(config.segment_count, 1, T);
  if (v < 1.0) blocks = block_inits(model, config, lo, hi);
  auto block_of = [&](Index tau) {
    Index k = std::min<Index>(K - 1, (tau * K + T - 1) / T);
    while (k > 0 && (k - 1) * T / K >= tau) --k;
    while (k < K - 1 && k * T / K < tau) ++k;
    return k;
  };

  const double c0 = penalty.pruning();
  std::vector<double> F(static_cast<std::size_t>(T + 1), kInf);
  std::vector<Index> last(static_cast<std::size_t>(T + 1), -1);
  F[0] = -penalty.beta;
  std::vector<double> adjust(static_cast<std::size_t>(T + 1), 0.0);
  for (Index n = 1; n <= T; ++n) adjust[static_cast<std::size_t>(n)] = penalty.adjust(n);

  std::vector<Candidate> R;
  auto add_candidate = [&](Index tau, const Vector* warm) {
    Candidate c;
    c.tau = tau;
    if (!blocks.empty()) {
      c.block = block_of(tau);
      c.theta0 = warm ? *warm : blocks[static_cast<std::size_t>(c.block)].theta;
    }
    R.push_back(std::move(c));
  };
  add_candidate(0, nullptr);

  auto evaluate = [&](Candidate& c, Index t) {
    const Index n = t - c.tau;
    c.evaluated = n >= m;
    if (!c.evaluated) return;
    if (static_cast<double>(n) <= vT) {
      c.cost = finite_or_inf(model.exact_cost(c.tau, t));
      return;
    }
    if (!c.state) {
      c.state = std::make_unique<CandidateState>(
          make_state(model, c.tau, c.theta0, blocks[static_cast<std::size_t>(c.block)].h0, config));
    }
    while (c.state->end() < t) segd_step(*c.state, model, config);
    const int W = config.epochs.epochs_for(n);
    c.state->epochs_done = W;
    c.cost = approx_cost_with_epochs(*c.state, model, config, W);
  };

  int threads = config.threads;
#ifdef _OPENMP
  if (threads <= 0) threads = omp_get_max_threads();
#else
  threads = 1;
#endif

  for (Index t = 1; t <= T; ++t) {
    std::erase_if(R, [&](const Candidate& c) { return c.expire <= t; });
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(R.size());
    if (threads > 1 && count >= 16) {
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
      for (std::ptrdiff_t k = 0; k < count; ++k) {
        try {
          evaluate(R[static_cast<std::size_t>(k)], t);
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      }
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    } else {
      for (Candidate& c : R) evaluate(c, t);
    }

    double best = kInf;
    Index arg = -1;
    const Candidate* best_c = nullptr;
    for (const Candidate& c : R) {
      if (!c.evaluated) continue;
      const double ft = F[static_cast<std::size_t>(c.tau)];
      const double val = ft + (c.cost + adjust[static_cast<std::size_t>(t - c.tau)]) + penalty.beta;
      if (val < best) {
        best = val;
        arg = c.tau;
        best_c = &c;
      }
    }
    F[static_cast<std::size_t>(t)] = best;
    last[static_cast<std::size_t>(t)] = arg;

    if (config.pruning && std::isfinite(best)) {
      for (Candidate& c : R) {
        if (!c.evaluated || c.expire != kNever || !std::isfinite(c.cost)) continue;
        if (F[static_cast<std::size_t>(c.tau)] + c.cost + adjust[static_cast<std::size_t>(t - c.tau)] + c0 > best) c.expire = t + m;
      }
    }
    if (t < T && std::isfinite(best)) {
      const Vector* warm = nullptr;
      if (config.warm_start && best_c && best_c->state) warm = &best_c->state->theta;
      Vector warm_copy = warm ? *warm : Vector();
      add_candidate(t, warm ? &warm_copy : nullptr);
    }
  }

  std::vector<Index> raw;
  if (std::isfinite(F[static_cast<std::size_t>(T)])) raw = backtrack(last, T);
  const std::vector<Index> trimmed = trim_change_points(model, raw, config.trim);
  DetectionResult r = report_segments(model, trimmed, config.cp_only);
  r.objective = F[static_cast<std::size_t>(T)];
  for (Index c : raw) r.raw_cp_set.push_back(c + model.time_offset());
  return r;
}

}  // namespace seqcpd
