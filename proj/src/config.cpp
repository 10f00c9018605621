#include "panelgls/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "panelgls/errors.hpp"
#include "panelgls/estimators.hpp"
#include "panelgls/inference.hpp"
#include "panelgls/io.hpp"

namespace panelgls {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& value) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + value + "'");
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

void apply_dgp_keys(const KeyValues& kv, DgpSpec& spec) {
  auto num = [&](const char* key, double& field) {
    if (auto it = kv.find(key); it != kv.end()) field = to_double(key, it->second);
  };
  if (auto it = kv.find("N"); it != kv.end()) spec.n = to_int<Eigen::Index>("N", it->second);
  if (auto it = kv.find("T"); it != kv.end()) spec.t = to_int<Eigen::Index>("T", it->second);
  if (auto it = kv.find("seed"); it != kv.end()) spec.seed = to_int<std::uint64_t>("seed", it->second);
  num("factor_ar", spec.factor_ar);
  num("factor_innov_var", spec.factor_innov_var);
  num("b1_mean", spec.b1.mean);
  num("b1_var", spec.b1.var);
  num("b2_mean", spec.b2.mean);
  num("b2_var", spec.b2.var);
  num("delta1_mean", spec.delta1.mean);
  num("delta1_var", spec.delta1.var);
  num("delta3_mean", spec.delta3.mean);
  num("delta3_var", spec.delta3.var);
  num("rho_eps_lo", spec.rho_eps.lo);
  num("rho_eps_hi", spec.rho_eps.hi);
  num("rho_v_lo", spec.rho_v.lo);
  num("rho_v_hi", spec.rho_v.hi);
  num("sigma2_lo", spec.sigma2.lo);
  num("sigma2_hi", spec.sigma2.hi);
  num("alpha0", spec.alpha0);
  num("x_intercept", spec.x_intercept);
  num("beta_low", spec.beta_low);
  num("beta_high", spec.beta_high);
  if (auto it = kv.find("distinct_regressor_factors"); it != kv.end()) {
    spec.distinct_regressor_factors = to_bool("distinct_regressor_factors", it->second);
  }
  num("regressor_factor_corr", spec.regressor_factor_corr);
}

std::string dgp_to_config(const DgpSpec& spec) {
  std::ostringstream out;
  auto line = [&](const char* key, double v) { out << key << " = " << format_double(v) << '\n'; };
  out << "N = " << spec.n << '\n' << "T = " << spec.t << '\n' << "seed = " << spec.seed << '\n';
  line("factor_ar", spec.factor_ar);
  line("factor_innov_var", spec.factor_innov_var);
  line("b1_mean", spec.b1.mean);
  line("b1_var", spec.b1.var);
  line("b2_mean", spec.b2.mean);
  line("b2_var", spec.b2.var);
  line("delta1_mean", spec.delta1.mean);
  line("delta1_var", spec.delta1.var);
  line("delta3_mean", spec.delta3.mean);
  line("delta3_var", spec.delta3.var);
  line("rho_eps_lo", spec.rho_eps.lo);
  line("rho_eps_hi", spec.rho_eps.hi);
  line("rho_v_lo", spec.rho_v.lo);
  line("rho_v_hi", spec.rho_v.hi);
  line("sigma2_lo", spec.sigma2.lo);
  line("sigma2_hi", spec.sigma2.hi);
  line("alpha0", spec.alpha0);
  line("x_intercept", spec.x_intercept);
  line("beta_low", spec.beta_low);
  line("beta_high", spec.beta_high);
  out << "distinct_regressor_factors = " << (spec.distinct_regressor_factors ? "true" : "false") << '\n';
  line("regressor_factor_corr", spec.regressor_factor_corr);
  return out.str();
}

RunConfig::Command parse_command(const std::string& name) {
  if (name == "estimate") return RunConfig::Command::estimate;
  if (name == "simulate") return RunConfig::Command::simulate;
  if (name == "mc") return RunConfig::Command::mc;
  throw ConfigError("unknown command '" + name + "'");
}

RunConfig config_from_keys(const KeyValues& kv) {
  RunConfig cfg;
  auto str = [&](const char* key, std::string& field) {
    if (auto it = kv.find(key); it != kv.end()) field = it->second;
  };
  if (auto it = kv.find("command"); it != kv.end()) cfg.command = parse_command(it->second);
  str("input", cfg.input_path);
  str("output", cfg.output_path);
  str("truth", cfg.truth_path);
  str("weight", cfg.weight_path);
  str("method", cfg.method);
  if (auto it = kv.find("steps"); it != kv.end()) cfg.steps = to_int<int>("steps", it->second);
  if (auto it = kv.find("bandwidth"); it != kv.end()) cfg.hac_bandwidth = to_int<int>("bandwidth", it->second);
  if (auto it = kv.find("inference"); it != kv.end()) cfg.inference = to_bool("inference", it->second);
  if (auto it = kv.find("intercept"); it != kv.end()) cfg.add_intercept = to_bool("intercept", it->second);
  if (auto it = kv.find("reps"); it != kv.end()) cfg.reps = to_int<int>("reps", it->second);
  if (auto it = kv.find("threads"); it != kv.end()) cfg.threads = to_int<unsigned>("threads", it->second);
  if (auto it = kv.find("estimators"); it != kv.end()) {
    cfg.estimators.clear();
    std::istringstream list(it->second);
    std::string name;
    while (std::getline(list, name, ',')) cfg.estimators.push_back(parse_mc_estimator(trim(name)));
  }
  if (auto it = kv.find("gls_alpha"); it != kv.end()) {
    if (it->second == "two_step") cfg.fgls_alpha = AlphaSource::two_step;
    else if (it->second == "breve") cfg.fgls_alpha = AlphaSource::breve;
    else throw ConfigError("gls_alpha must be two_step or breve");
  }
  static const char* dgp_keys[] = {"N", "T", "seed", "factor_ar", "factor_innov_var", "b1_mean", "b1_var",
                                   "b2_mean", "b2_var", "delta1_mean", "delta1_var", "delta3_mean",
                                   "delta3_var", "rho_eps_lo", "rho_eps_hi", "rho_v_lo", "rho_v_hi",
                                   "sigma2_lo", "sigma2_hi", "alpha0", "x_intercept", "beta_low",
                                   "beta_high", "distinct_regressor_factors", "regressor_factor_corr"};
  for (const char* key : dgp_keys) {
    if (kv.count(key)) {
      DgpSpec spec;
      apply_dgp_keys(kv, spec);
      cfg.dgp = spec;
      break;
    }
  }
  return cfg;
}

void RunConfig::validate() const {
  switch (command) {
    case Command::estimate:
      if (input_path.empty()) throw ConfigError("estimate requires an input path");
      if (output_path.empty()) throw ConfigError("estimate requires an output path");
      if (method == "ugls" && weight_path.empty()) {
        throw ConfigError("--method ugls needs a T x T covariance file (weight = PATH)");
      }
      break;
    case Command::simulate:
      if (output_path.empty()) throw ConfigError("simulate requires an output path");
      break;
    case Command::mc:
      if (!dgp) throw ConfigError("mc requires a DGP specification (N, T, seed, ...)");
      if (reps < 1) throw ConfigError("mc requires reps >= 1");
      if (output_path.empty()) throw ConfigError("mc requires an output path");
      break;
  }
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (hac_bandwidth && *hac_bandwidth < 0) throw ConfigError("bandwidth must be >= 0");
}

namespace {

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

void run_estimate(const RunConfig& cfg) {
  PanelData panel = load_panel_csv(cfg.input_path, LoadOptions{cfg.add_intercept});
  const Eigen::Index intercept = constant_column(panel.d);
  EstimateSet est;
  std::optional<InferenceSet> inf;
  auto bandwidth_for = [&](Eigen::Index rows) { return cfg.hac_bandwidth.value_or(default_bandwidth(rows)); };

  if (cfg.method == "breve") {
    est = joint_breve(panel);
    if (cfg.inference) {
      inf = hac_cov_breve(panel, est, HacSpec{bandwidth_for(panel.periods()), HacSpec::Mode::weighted_regressors});
      wald_tests(est, *inf, panel.common_cols(), intercept);
    }
  } else {
    const PanelData* target = &panel;
    PanelData dual;
    if (cfg.method == "xsec") {
      dual = cross_section_view(panel);
      target = &dual;
    }
    const TransformedPanel tp = transform(*target);
    HacSpec::Mode mode = HacSpec::Mode::weighted_regressors;
    if (cfg.method == "ols") {
      est = ols(tp);
      mode = HacSpec::Mode::plain;
    } else if (cfg.method == "ugls") {
      const Matrix s = read_matrix_csv(cfg.weight_path);
      if (s.rows() != panel.periods() || s.cols() != panel.periods()) {
        throw DimensionError("weight file must be " + std::to_string(panel.periods()) + " x " +
                             std::to_string(panel.periods()));
      }
      est = ugls(tp, WeightMatrix::dense(tp.complement.project(s * tp.complement.basis)));
      est.alpha = joint_gls(panel, WeightMatrix::dense(s)).alpha;
    } else if (cfg.method == "fgls" || cfg.method == "alpha2") {
      est = fgls(tp);
    } else if (cfg.method == "iter") {
      est = iterated_fgls(tp, cfg.steps);
    } else if (cfg.method == "xsec") {
      est = cross_sectional_fgls(dual);
    } else {
      throw ConfigError("unknown method '" + cfg.method + "'");
    }
    if (cfg.inference) {
      inf = hac_cov_fgls(tp, est, HacSpec{bandwidth_for(tp.rows()), mode});
    }
    if (cfg.method == "alpha2") {
      est = alpha_two_step(panel, est);
    } else if (!est.alpha) {
      est.alpha = project_alpha(*target, est.beta);
    }
    if (inf) wald_tests(est, *inf, target->common_cols(), constant_column(target->d));
  }
  write_estimates_csv(est, inf ? &*inf : nullptr, cfg.output_path);
}

void run_simulate(const RunConfig& cfg) {
  const DgpSpec spec = cfg.dgp.value_or(DgpSpec{});
  const SimulatedPanel sim = simulate(spec);
  write_panel_csv(sim.panel, cfg.output_path);
  write_truth_csv(sim, cfg.truth_path.empty() ? sibling_path(cfg.output_path, "_truth.csv") : cfg.truth_path);
  write_matrix_csv(oracle_covariance(sim.structure), sibling_path(cfg.output_path, "_covariance.csv"));
}

void run_monte_carlo(const RunConfig& cfg) {
  McOptions options;
  options.reps = cfg.reps;
  options.steps = cfg.steps;
  options.threads = cfg.threads;
  options.estimators = cfg.estimators;
  options.fgls_alpha = cfg.fgls_alpha;
  const McSummary summary = run_mc(*cfg.dgp, options);
  write_mc_summary_csv(summary, cfg.output_path);
}

}  // namespace

void execute(const RunConfig& config) {
  config.validate();
  switch (config.command) {
    case RunConfig::Command::estimate: run_estimate(config); break;
    case RunConfig::Command::simulate: run_simulate(config); break;
    case RunConfig::Command::mc: run_monte_carlo(config); break;
  }
}

int run_cli(const RunConfig& config) {
  try {
    execute(config);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace panelgls
