#pragma once

// Flat `key = value` configuration ('#' starts a comment) and the
// orchestration behind the command-line tool.

#include <map>
#include <optional>
#include <string>

#include "panelgls/dgp.hpp"
#include "panelgls/montecarlo.hpp"

namespace panelgls {

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines. Throws ConfigError on lines without '='.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_value_file(const std::string& path);

/// Applies the DGP keys present in `kv` (N, T, seed, factor_ar, b1_mean, ...)
/// to `spec`; unknown keys are ignored here.
void apply_dgp_keys(const KeyValues& kv, DgpSpec& spec);
/// Every DGP field as `key = value` lines; apply_dgp_keys inverts it exactly.
std::string dgp_to_config(const DgpSpec& spec);

struct RunConfig {
  enum class Command { estimate, simulate, mc };
  Command command = Command::estimate;
  std::string input_path;
  std::string output_path;
  std::string truth_path;   // simulate: defaults to <output stem>_truth.csv
  std::string weight_path;  // estimate --method ugls: T x T covariance CSV
  std::string method = "fgls";  // ols, ugls, fgls, iter, breve, alpha2, xsec
  int steps = 4;
  std::optional<int> hac_bandwidth;
  bool inference = true;
  bool add_intercept = true;
  std::optional<DgpSpec> dgp;
  int reps = 500;
  unsigned threads = 1;
  std::vector<McEstimator> estimators{McEstimator::fgls, McEstimator::fgls_iter, McEstimator::ols,
                                      McEstimator::ugls};
  AlphaSource fgls_alpha = AlphaSource::two_step;

  /// Throws ConfigError when a command's required fields are missing.
  void validate() const;
};

RunConfig::Command parse_command(const std::string& name);

/// Builds a RunConfig from config-file keys (later overridden by flags).
RunConfig config_from_keys(const KeyValues& kv);

/// Executes the configured command. Returns 0 on success; on failure writes a
/// single `error: <Kind>: <message>` line to stderr and returns nonzero.
int run_cli(const RunConfig& config);

/// Same as run_cli but lets errors propagate.
void execute(const RunConfig& config);

}  // namespace panelgls
