#include "seqcpd/datagen.hpp"
#include "seqcpd/engine.hpp"
#include "seqcpd/family.hpp"
#include "seqcpd/io.hpp"
#include "seqcpd/oracle.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace seqcpd;

namespace {

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty() && item.front() == '+') item.erase(0, 1);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || std::isnan(v))
      throw InvalidConfig(flag + " expects comma-separated numbers, got '" + text + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())); }

struct DetectArgs {
  std::string family = "mean";
  std::string data;
  std::string beta = "MBIC";
  std::string cost_adjustment;
  std::string order;
  double trim = 0.02;
  Index segment_count = 10;
  std::optional<double> vanilla;
  std::string epochs_rule;
  std::string line_search = "1";
  std::string line_search_mode = "whole";
  std::string precond_update = "before";
  std::string lower;
  std::string upper;
  double epsilon = 1e-10;
  double momentum = 0.0;
  double prior_weight = 5.0;
  std::string engine = "fast";
  std::string out;
  std::string format = "json";
  std::optional<double> pruning_coef;
  std::optional<double> theta_l1_bound;
  double huber_delta = 1.0;
  std::string arma_variance = "joint";
  bool warm_start = false;
  bool cp_only = false;
  bool no_pruning = false;
};

struct GenerateArgs {
  std::string dgp;
  std::uint64_t seed = 1;
  std::string out;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

int run_detect(const DetectArgs& a) {
  if (a.data.empty()) throw InvalidConfig("required flag: --data");
  DetectorConfig config;
  FamilySpec spec;
  spec.family = a.family;
  role_for(a.family);
  if (a.beta == "BIC" || a.beta == "MBIC" || a.beta == "MDL" || a.beta == "bic" || a.beta == "mbic" ||
      a.beta == "mdl") {
    config.penalty.criterion = parse_criterion(a.beta);
  } else {
    const std::vector<double> b = parse_list("--beta", a.beta);
    if (b.size() != 1) throw InvalidConfig("--beta must be BIC, MBIC, MDL or a number");
    config.penalty.criterion = Criterion::manual;
    config.penalty.beta = b[0];
  }
  if (!a.cost_adjustment.empty()) config.penalty.adjustment = parse_adjustment(a.cost_adjustment);
  config.penalty.pruning_base = a.pruning_coef;
  if (!a.order.empty())
    for (double v : parse_list("--order", a.order)) {
      if (v < 0 || v != std::floor(v)) throw InvalidConfig("--order entries must be nonnegative integers");
      spec.order.push_back(static_cast<Index>(v));
    }
  spec.theta_l1_bound = a.theta_l1_bound;
  spec.huber_delta = a.huber_delta;
  if (a.arma_variance == "joint") spec.arma_variance = ArmaVariance::joint;
  else if (a.arma_variance == "fixed") spec.arma_variance = ArmaVariance::fixed;
  else throw InvalidConfig("--arma-variance must be joint or fixed");
  config.trim = a.trim;
  config.segment_count = a.segment_count;
  config.vanilla_percentage = a.vanilla;
  config.epochs = EpochRule::parse(a.epochs_rule);
  config.line_search = parse_list("--line-search", a.line_search);
  if (a.line_search_mode == "whole") config.line_search_mode = LineSearchMode::whole_segment;
  else if (a.line_search_mode == "newest") config.line_search_mode = LineSearchMode::newest_point;
  else throw InvalidConfig("--line-search-mode must be whole or newest");
  if (a.precond_update == "before") config.precond_update = PrecondUpdate::before_step;
  else if (a.precond_update == "after") config.precond_update = PrecondUpdate::after_step;
  else throw InvalidConfig("--precond-update must be before or after");
  if (!a.lower.empty()) config.lower = to_vector(parse_list("--lower", a.lower));
  if (!a.upper.empty()) config.upper = to_vector(parse_list("--upper", a.upper));
  config.epsilon = a.epsilon;
  config.momentum_coef = a.momentum;
  config.prior_weight = a.prior_weight;
  config.warm_start = a.warm_start;
  config.cp_only = a.cp_only;
  config.pruning = !a.no_pruning;
  if (const char* env = std::getenv("CPD_THREADS")) {
    const std::vector<double> t = parse_list("CPD_THREADS", env);
    if (t.size() != 1 || t[0] < 1 || t[0] != std::floor(t[0])) throw InvalidConfig("CPD_THREADS must be a positive integer");
    config.threads = static_cast<int>(t[0]);
  }
  const OutputFormat format = parse_format(a.format);
  if (a.engine != "fast" && a.engine != "oracle") throw InvalidConfig("--engine must be fast or oracle");
  config.validate();

  const CsvTable table = read_csv(a.data);
  const auto model = make_model(spec, table.values, config);
  DetectionResult result;
  if (a.engine == "oracle") {
    if (model->size() > 200) throw InvalidConfig("--engine oracle is limited to 200 rows");
    result = dp_exhaustive(*model, resolve_for(config, *model), config.cp_only);
  } else {
    result = detect(config, *model);
  }
  write_output(a.out, emit(result, format, table.values));
  return 0;
}

int run_generate(const GenerateArgs& a) {
  const Generated g = generate(a.dgp, a.seed);
  std::vector<std::string> header;
  if (g.role == DataRole::labeled) {
    header.push_back("y");
    for (Index k = 1; k < g.values.cols(); ++k) header.push_back("x" + std::to_string(k));
  } else {
    for (Index k = 0; k < g.values.cols(); ++k) header.push_back("x" + std::to_string(k + 1));
  }
  std::ostringstream out;
  write_csv(out, g.values, header);
  write_output(a.out, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized change point detection with PELT pruning and sequential quasi-Newton cost updates"};
  app.require_subcommand(1);

  DetectArgs d;
  auto* detect_cmd = app.add_subcommand("detect", "Detect change points in a CSV series");
  detect_cmd->add_option("--family", d.family, "mean, variance, meanvariance, median, lm, binomial, poisson, lasso, ar, "
                                                "arma, var or huber")
      ->capture_default_str();
  detect_cmd->add_option("--data", d.data, "Input CSV (labeled families take the response in column 0)");
  detect_cmd->add_option("--beta", d.beta, "BIC, MBIC, MDL or a number")->capture_default_str();
  detect_cmd->add_option("--cost-adjustment", d.cost_adjustment, "BIC, MBIC, MDL or NONE (default follows --beta)");
  detect_cmd->add_option("--order", d.order, "Model order p or p,q");
  detect_cmd->add_option("--trim", d.trim, "Boundary and merge distance as a fraction of T")->capture_default_str();
  detect_cmd->add_option("--segment-count", d.segment_count, "Blocks used for initial estimates")->capture_default_str();
  detect_cmd->add_option("--vanilla-percentage", d.vanilla, "Fraction of T below which exact costs are used");
  detect_cmd->add_option("--epochs-rule", d.epochs_rule, "Extra epochs, e.g. lt:100=1");
  detect_cmd->add_option("--line-search", d.line_search, "Step multipliers, e.g. 1,0.1,0.01")->capture_default_str();
  detect_cmd->add_option("--line-search-mode", d.line_search_mode, "whole or newest")->capture_default_str();
  detect_cmd->add_option("--precond-update", d.precond_update,
                         "Add the newest point's Hessian before or after its step")
      ->capture_default_str();
  detect_cmd->add_option("--lower", d.lower, "Lower parameter bounds (comma list)");
  detect_cmd->add_option("--upper", d.upper, "Upper parameter bounds (comma list)");
  detect_cmd->add_option("--epsilon", d.epsilon, "Ridge added before inverting the preconditioner")->capture_default_str();
  detect_cmd->add_option("--prior-weight", d.prior_weight, "Rows of curvature in each new candidate's preconditioner")
      ->capture_default_str();
  detect_cmd->add_option("--momentum", d.momentum, "Heavy-ball coefficient in [0, 1)")->capture_default_str();
  detect_cmd->add_option("--engine", d.engine, "fast or oracle")->capture_default_str();
  detect_cmd->add_option("--out", d.out, "Output path (default stdout)");
  detect_cmd->add_option("--format", d.format, "json, text or svg")->capture_default_str();
  detect_cmd->add_option("--pruning-coef", d.pruning_coef, "Override the family pruning constant c0");
  detect_cmd->add_option("--theta-l1-bound", d.theta_l1_bound, "Lasso bound on |theta|_1 used for c0");
  detect_cmd->add_option("--huber-delta", d.huber_delta, "Huber threshold")->capture_default_str();
  detect_cmd->add_option("--arma-variance", d.arma_variance, "joint or fixed")->capture_default_str();
  detect_cmd->add_flag("--warm-start", d.warm_start, "Start new candidates from the previous segment's estimate");
  detect_cmd->add_flag("--cp-only", d.cp_only, "Skip parameters and residuals");
  detect_cmd->add_flag("--no-pruning", d.no_pruning, "Disable PELT pruning");

  GenerateArgs g;
  auto* gen_cmd = app.add_subcommand("generate", "Write a simulated data set as CSV");
  gen_cmd->add_option("--dgp", g.dgp, "Generator id")->required();
  gen_cmd->add_option("--seed", g.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--out", g.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*detect_cmd) return run_detect(d);
    return run_generate(g);
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedFamily& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownDgp& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
