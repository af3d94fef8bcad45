#include "seqcpd/datagen.hpp"
#include "seqcpd/engine.hpp"
#include "seqcpd/family.hpp"
#include "seqcpd/penalties.hpp"
#include "seqcpd/variance.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cctype>

namespace py = pybind11;
using namespace seqcpd;

namespace {

void apply_beta(DetectorConfig& config, const py::object& beta) {
  if (py::isinstance<py::str>(beta)) {
    config.penalty.criterion = parse_criterion(beta.cast<std::string>());
  } else {
    config.penalty.criterion = Criterion::manual;
    config.penalty.beta = beta.cast<double>();
  }
}

py::dict to_dict(const DetectionResult& r) {
  py::dict d;
  d["change_points"] = r.cp_set;
  d["cost_values"] = r.cost_values;
  d["parameters"] = r.thetas;
  d["residuals"] = r.residuals ? py::cast(*r.residuals) : py::none();
  d["objective"] = r.objective;
  d["raw_change_points"] = r.raw_cp_set;
  return d;
}

py::dict detect_py(const Matrix& values, const std::string& family, const py::object& beta,
                   std::optional<std::string> cost_adjustment, std::vector<Index> order, double trim,
                   Index segment_count, std::optional<double> vanilla_percentage, const std::string& epochs_rule,
                   std::vector<double> line_search, std::optional<Vector> lower, std::optional<Vector> upper,
                   double epsilon, double momentum, bool warm_start, bool cp_only, bool pruning,
                   std::optional<double> theta_l1_bound, double huber_delta, const std::string& arma_variance,
                   int threads) {
  DetectorConfig config;
  apply_beta(config, beta);
  if (cost_adjustment) config.penalty.adjustment = parse_adjustment(*cost_adjustment);
  config.trim = trim;
  config.segment_count = segment_count;
  config.vanilla_percentage = vanilla_percentage;
  config.epochs = EpochRule::parse(epochs_rule);
  config.line_search = std::move(line_search);
  config.lower = std::move(lower);
  config.upper = std::move(upper);
  config.epsilon = epsilon;
  config.momentum_coef = momentum;
  config.warm_start = warm_start;
  config.cp_only = cp_only;
  config.pruning = pruning;
  config.threads = threads;
  FamilySpec spec;
  spec.family = family;
  spec.order = std::move(order);
  spec.theta_l1_bound = theta_l1_bound;
  spec.huber_delta = huber_delta;
  if (arma_variance == "joint") spec.arma_variance = ArmaVariance::joint;
  else if (arma_variance == "fixed") spec.arma_variance = ArmaVariance::fixed;
  else throw InvalidConfig("arma_variance must be joint or fixed");
  DetectionResult r;
  {
    py::gil_scoped_release release;
    r = detect(config, spec, values);
  }
  return to_dict(r);
}

py::dict generate_py(const std::string& dgp, std::uint64_t seed) {
  const Generated g = generate(dgp, seed);
  py::dict d;
  d["dgp"] = g.dgp;
  d["family"] = g.family;
  d["values"] = g.values;
  d["true_change_points"] = g.true_cps;
  d["true_parameters"] = g.true_params;
  std::vector<Index> order;
  if (g.p) order.push_back(g.p);
  if (g.q) order.push_back(g.q);
  d["order"] = order;
  return d;
}

}  // namespace

PYBIND11_MODULE(_seqcpd, m) {
  m.doc() = "Penalized change point detection with sequential gradient cost updates";

  py::register_exception<Error>(m, "SeqcpdError", PyExc_RuntimeError);
  py::register_exception<InvalidConfig>(m, "InvalidConfig", PyExc_ValueError);

  m.def("detect", &detect_py, py::arg("values"), py::arg("family") = "mean", py::arg("beta") = "MBIC",
        py::arg("cost_adjustment") = py::none(), py::arg("order") = std::vector<Index>{}, py::arg("trim") = 0.02,
        py::arg("segment_count") = 10, py::arg("vanilla_percentage") = py::none(), py::arg("epochs_rule") = "",
        py::arg("line_search") = std::vector<double>{1.0}, py::arg("lower") = py::none(),
        py::arg("upper") = py::none(), py::arg("epsilon") = 1e-10, py::arg("momentum") = 0.0,
        py::arg("warm_start") = false, py::arg("cp_only") = false, py::arg("pruning") = true,
        py::arg("theta_l1_bound") = py::none(), py::arg("huber_delta") = 1.0, py::arg("arma_variance") = "joint",
        py::arg("threads") = 0);
  m.def("generate", &generate_py, py::arg("dgp"), py::arg("seed") = 1);
  m.def("dgp_ids", &dgp_ids);
  m.def("family_ids", &family_ids);
  m.def(
      "beta_value",
      [](const std::string& criterion, Index d, Index T) { return beta_value(parse_criterion(criterion), d, T); },
      py::arg("criterion"), py::arg("d"), py::arg("T"));
  m.def("rice_mean", &rice_mean, py::arg("series"));
  m.def("laplace_rice", &laplace_rice, py::arg("series"));
  m.def(
      "grice_lm",
      [](const Matrix& x, const Vector& y, std::optional<Index> window) {
        return grice_lm(x, y, window ? *window : default_grice_window(x.cols()));
      },
      py::arg("x"), py::arg("y"), py::arg("window") = py::none());
}
