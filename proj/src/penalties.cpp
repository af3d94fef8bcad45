#include "seqcpd/penalties.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace seqcpd {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

}  // namespace

double beta_value(Criterion criterion, Index d_p, Index T) {
  const double d = static_cast<double>(d_p);
  const double t = static_cast<double>(T);
  switch (criterion) {
    case Criterion::bic:
      return (d + 1.0) * std::log(t) / 2.0;
    case Criterion::mbic:
      return (d + 2.0) * std::log(t) / 2.0;
    case Criterion::mdl:
      return (d + 2.0) * std::log2(t) / 2.0;
    case Criterion::manual:
      break;
  }
  throw InvalidConfig("manual criterion has no closed-form beta");
}

double cost_adjustment(AdjustmentKind kind, Index seg_len, Index T, Index d_p) {
  const double r = static_cast<double>(seg_len) / static_cast<double>(T);
  const double d = static_cast<double>(d_p);
  switch (kind) {
    case AdjustmentKind::none:
      return 0.0;
    case AdjustmentKind::mbic:
      return d * std::log(r) / 2.0;
    case AdjustmentKind::mdl:
      return d * std::log2(r) / 2.0;
  }
  return 0.0;
}

double pruning_constant(AdjustmentKind kind, Index d_p, double c0_base) {
  const double d = static_cast<double>(d_p);
  switch (kind) {
    case AdjustmentKind::none:
      return c0_base;
    case AdjustmentKind::mbic:
      return c0_base + d * std::log(2.0);
    case AdjustmentKind::mdl:
      return c0_base + d;
  }
  return c0_base;
}

double PenaltySpec::adjust(Index seg_len) const { return cost_adjustment(adjustment, seg_len, T, d_p); }

double PenaltySpec::pruning() const { return pruning_constant(adjustment, d_p, pruning_base); }

PenaltySpec resolve_penalty(const PenaltyChoice& choice, Index d_p, Index T, double family_c0) {
  if (d_p < 1) throw InvalidConfig("parameter dimension must be at least 1");
  if (T < 2) throw InvalidConfig("series length must be at least 2");
  PenaltySpec spec;
  spec.criterion = choice.criterion;
  spec.d_p = d_p;
  spec.T = T;
  spec.pruning_base = choice.pruning_base.value_or(family_c0);
  if (choice.criterion == Criterion::manual) {
    if (!std::isfinite(choice.beta) || choice.beta < 0.0)
      throw InvalidConfig("--beta must be a finite nonnegative number");
    spec.beta = choice.beta;
  } else {
    spec.beta = beta_value(choice.criterion, d_p, T);
  }
  AdjustmentKind fallback = AdjustmentKind::none;
  if (choice.criterion == Criterion::mbic) fallback = AdjustmentKind::mbic;
  if (choice.criterion == Criterion::mdl) fallback = AdjustmentKind::mdl;
  spec.adjustment = choice.adjustment.value_or(fallback);
  return spec;
}

Criterion parse_criterion(std::string_view name) {
  const std::string u = upper(name);
  if (u == "BIC") return Criterion::bic;
  if (u == "MBIC") return Criterion::mbic;
  if (u == "MDL") return Criterion::mdl;
  throw InvalidConfig("--beta must be BIC, MBIC, MDL or a number, got '" + std::string(name) + "'");
}

AdjustmentKind parse_adjustment(std::string_view name) {
  const std::string u = upper(name);
  if (u == "NONE" || u == "BIC") return AdjustmentKind::none;
  if (u == "MBIC") return AdjustmentKind::mbic;
  if (u == "MDL") return AdjustmentKind::mdl;
  throw InvalidConfig("--cost-adjustment must be BIC, MBIC, MDL or NONE, got '" + std::string(name) + "'");
}

}  // namespace seqcpd
