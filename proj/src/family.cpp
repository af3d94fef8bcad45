#include "seqcpd/family.hpp"

#include "seqcpd/datagen.hpp"
#include "seqcpd/gaussian.hpp"
#include "seqcpd/regression.hpp"

namespace seqcpd {

namespace {

Index single_order(const FamilySpec& spec) {
  if (spec.order.size() != 1 || spec.order[0] < 1)
    throw InvalidConfig("--order for " + spec.family + " needs one positive integer p");
  return spec.order[0];
}

}  // namespace

std::vector<std::string> family_ids() {
  return {"mean", "variance", "meanvariance", "median", "lm", "binomial",
          "poisson", "lasso", "ar", "arma", "var", "huber"};
}

DataRole role_for(const std::string& family) {
  if (family == "lm" || family == "binomial" || family == "poisson" || family == "lasso" || family == "huber")
    return DataRole::labeled;
  if (family == "ar" || family == "arma" || family == "var") return DataRole::timeseries;
  if (family == "mean" || family == "variance" || family == "meanvariance" || family == "median")
    return DataRole::unlabeled;
  throw InvalidConfig("--family must be one of mean, variance, meanvariance, median, lm, binomial, poisson, lasso, "
                      "ar, arma, var, huber; got '" + family + "'");
}

std::unique_ptr<CostModel> make_model(const FamilySpec& spec, const Matrix& values, const DetectorConfig& config) {
  const std::string& f = spec.family;
  SeriesData data(values, role_for(f));
  std::unique_ptr<CostModel> model;
  if (f == "mean") model = std::make_unique<MeanModel>(std::move(data));
  else if (f == "variance") model = std::make_unique<VarianceModel>(data);
  else if (f == "meanvariance") model = std::make_unique<MeanVarianceModel>(data);
  else if (f == "median") model = std::make_unique<MedianModel>(data);
  else if (f == "lm") model = std::make_unique<LinearModel>(std::move(data));
  else if (f == "binomial") model = std::make_unique<GlmModel>(std::move(data), GlmLink::binomial);
  else if (f == "poisson") model = std::make_unique<GlmModel>(std::move(data), GlmLink::poisson);
  else if (f == "lasso") model = std::make_unique<LassoModel>(std::move(data), std::nullopt, spec.theta_l1_bound.value_or(50.0));
  else if (f == "huber") model = huber_model(std::move(data), spec.huber_delta);
  else if (f == "ar") model = make_ar_model(data, single_order(spec));
  else if (f == "var") model = std::make_unique<VarModel>(data, single_order(spec));
  else if (f == "arma") {
    if (spec.order.size() != 2) throw InvalidConfig("--order for arma needs p,q");
    model = std::make_unique<ArmaModel>(data, spec.order[0], spec.order[1], spec.arma_variance);
  }
  if (config.lower || config.upper) {
    const Vector lo = config.lower.value_or(model->lower());
    const Vector hi = config.upper.value_or(model->upper());
    model->set_bounds(lo, hi);
  }
  return model;
}

DetectionResult detect(const DetectorConfig& config, const FamilySpec& spec, const Matrix& values) {
  config.validate();
  const auto model = make_model(spec, values, config);
  return detect(config, *model);
}

}  // namespace seqcpd
