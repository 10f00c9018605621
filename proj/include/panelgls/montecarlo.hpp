#pragma once

#include <functional>
#include <string>
#include <vector>

#include "panelgls/dgp.hpp"

namespace panelgls {

enum class McEstimator { fgls, fgls_iter, ols, ugls, breve };

std::string mc_estimator_name(McEstimator e);
McEstimator parse_mc_estimator(const std::string& name);

/// Source of the intercept estimate reported for the feasible GLS estimators.
enum class AlphaSource {
  two_step,  // projection of y_i - X_i beta_i on D
  breve      // alpha from the joint breve estimator
};

struct McOptions {
  int reps = 500;
  int steps = 4;  // J for fgls_iter
  unsigned threads = 1;
  std::vector<McEstimator> estimators{McEstimator::fgls, McEstimator::fgls_iter, McEstimator::ols,
                                      McEstimator::ugls};
  AlphaSource fgls_alpha = AlphaSource::two_step;
  /// Fraction of dropped replications above which run_mc throws McError.
  double max_drop_rate = 0.01;
};

struct McCell {
  std::string estimator;
  std::string group;  // alpha, beta_low, beta_high
  double truth = 0.0;
  double mean = 0.0;  // average over units of the per-unit MC mean
  double rmse = 0.0;  // average over units of the per-unit MC rmse
};

struct McSummary {
  Eigen::Index n = 0;
  Eigen::Index t = 0;
  int reps = 0;     // replications used
  int dropped = 0;  // replications discarded after an estimator failure
  std::vector<McCell> cells;

  const McCell& at(const std::string& estimator, const std::string& group) const;
};

/// Seed of replication r: spec.seed XOR r.
std::uint64_t replication_seed(std::uint64_t seed, int replication);

/// Runs `options.reps` replications and aggregates per unit, then per group.
/// Output does not depend on `options.threads`.
McSummary run_mc(const DgpSpec& spec, const McOptions& options);

/// Unit-level estimates of one replication: alpha and beta (K = 1) for each
/// requested estimator, in the order of `options.estimators`.
struct ReplicationResult {
  bool ok = false;
  std::vector<Vector> alpha;
  std::vector<Vector> beta;
};

ReplicationResult run_replication(const DgpSpec& spec, const McOptions& options, int replication);

/// Calls body(i) for i in [0, count) on `threads` workers (inline when 1).
void parallel_for(int count, unsigned threads, const std::function<void(int)>& body);

}  // namespace panelgls
