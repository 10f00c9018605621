#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "panelgls/config.hpp"
#include "panelgls/errors.hpp"

using namespace panelgls;

namespace {

struct Flags {
  std::string config;
  std::string input;
  std::string out;
  std::string truth;
  std::string weight;
  std::string method;
  std::string estimators;
  std::string gls_alpha;
  std::optional<int> steps;
  std::optional<int> bandwidth;
  std::optional<std::uint64_t> seed;
  std::optional<long> n;
  std::optional<long> t;
  std::optional<int> reps;
  std::optional<unsigned> threads;
  bool no_inference = false;
  bool no_intercept = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key = value configuration file");
  app->add_option("--out", f.out, "output CSV path");
  app->add_option("--steps", f.steps, "number of GLS solves for the multi-step estimator");
}

void add_dgp(CLI::App* app, Flags& f) {
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--N", f.n, "number of units");
  app->add_option("--T", f.t, "number of periods");
}

RunConfig build_config(const std::string& command, const Flags& f) {
  KeyValues kv;
  if (!f.config.empty()) kv = read_key_value_file(f.config);
  kv["command"] = command;
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) kv[key] = v;
  };
  set("input", f.input);
  set("output", f.out);
  set("truth", f.truth);
  set("weight", f.weight);
  set("method", f.method);
  set("estimators", f.estimators);
  set("gls_alpha", f.gls_alpha);
  if (f.steps) kv["steps"] = std::to_string(*f.steps);
  if (f.bandwidth) kv["bandwidth"] = std::to_string(*f.bandwidth);
  if (f.seed) kv["seed"] = std::to_string(*f.seed);
  if (f.n) kv["N"] = std::to_string(*f.n);
  if (f.t) kv["T"] = std::to_string(*f.t);
  if (f.reps) kv["reps"] = std::to_string(*f.reps);
  if (f.threads) kv["threads"] = std::to_string(*f.threads);
  if (f.no_inference) kv["inference"] = "false";
  if (f.no_intercept) kv["intercept"] = "false";
  RunConfig cfg = config_from_keys(kv);
  if (command != "estimate" && !cfg.dgp) cfg.dgp = DgpSpec{};
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous panel regression with common regressors and factor errors"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* estimate = app.add_subcommand("estimate", "estimate unit coefficients from a panel CSV");
  add_common(estimate, flags);
  estimate->add_option("--input", flags.input, "long-format panel CSV");
  estimate->add_option("--method", flags.method, "ols, ugls, fgls, iter, breve, alpha2 or xsec");
  estimate->add_option("--weight", flags.weight, "T x T covariance CSV for ugls");
  estimate->add_option("--bandwidth", flags.bandwidth, "Newey-West bandwidth");
  estimate->add_flag("--no-inference", flags.no_inference, "skip standard errors and Wald tests");
  estimate->add_flag("--no-intercept", flags.no_intercept, "do not add a constant to D");

  CLI::App* sim = app.add_subcommand("simulate", "draw one panel from the Monte Carlo design");
  add_common(sim, flags);
  add_dgp(sim, flags);
  sim->add_option("--truth", flags.truth, "true coefficients CSV");

  CLI::App* mc = app.add_subcommand("mc", "run a Monte Carlo experiment");
  add_common(mc, flags);
  add_dgp(mc, flags);
  mc->add_option("--reps", flags.reps, "number of replications");
  mc->add_option("--threads", flags.threads, "worker threads");
  mc->add_option("--estimators", flags.estimators, "comma list of gls, gls_multistep, ols, ugls, breve");
  mc->add_option("--gls-alpha", flags.gls_alpha, "two_step or breve");

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = build_config(command, flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  }
  return run_cli(cfg);
}
