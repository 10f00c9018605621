#include "panelgls/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

#include "panelgls/errors.hpp"
#include "panelgls/estimators.hpp"

namespace panelgls {

std::string mc_estimator_name(McEstimator e) {
  switch (e) {
    case McEstimator::fgls: return "gls";
    case McEstimator::fgls_iter: return "gls_multistep";
    case McEstimator::ols: return "ols";
    case McEstimator::ugls: return "ugls";
    case McEstimator::breve: return "breve";
  }
  return "unknown";
}

McEstimator parse_mc_estimator(const std::string& name) {
  if (name == "gls" || name == "fgls") return McEstimator::fgls;
  if (name == "gls_multistep" || name == "iter") return McEstimator::fgls_iter;
  if (name == "ols") return McEstimator::ols;
  if (name == "ugls") return McEstimator::ugls;
  if (name == "breve") return McEstimator::breve;
  throw ConfigError("unknown Monte Carlo estimator '" + name + "'");
}

const McCell& McSummary::at(const std::string& estimator, const std::string& group) const {
  for (const McCell& c : cells) {
    if (c.estimator == estimator && c.group == group) return c;
  }
  throw McError("no summary cell " + estimator + "/" + group);
}

std::uint64_t replication_seed(std::uint64_t seed, int replication) {
  return seed ^ static_cast<std::uint64_t>(replication);
}

void parallel_for(int count, unsigned threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      if (failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
  pool.reserve(n);
  for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ReplicationResult run_replication(const DgpSpec& spec, const McOptions& options, int replication) {
  DgpSpec rep_spec = spec;
  rep_spec.seed = replication_seed(spec.seed, replication);
  ReplicationResult out;
  try {
    const SimulatedPanel sim = simulate(rep_spec);
    const PanelData& panel = sim.panel;
    const TransformedPanel tp = transform(panel);

    std::optional<EstimateSet> breve_fit;
    auto breve = [&]() -> const EstimateSet& {
      if (!breve_fit) breve_fit = joint_breve(panel);
      return *breve_fit;
    };

    for (McEstimator e : options.estimators) {
      Vector alpha;
      Vector beta;
      switch (e) {
        case McEstimator::ols: {
          const EstimateSet est = ols(tp);
          beta = est.beta.row(0).transpose();
          alpha = project_alpha(panel, est.beta).row(0).transpose();
          break;
        }
        case McEstimator::ugls: {
          const EstimateSet est = ugls(tp, oracle_weight(sim.structure, tp.complement));
          beta = est.beta.row(0).transpose();
          alpha = joint_gls(panel, WeightMatrix::dense(oracle_covariance(sim.structure))).alpha->row(0).transpose();
          break;
        }
        case McEstimator::fgls:
        case McEstimator::fgls_iter: {
          const EstimateSet est =
              e == McEstimator::fgls ? fgls(tp) : iterated_fgls(tp, options.steps);
          beta = est.beta.row(0).transpose();
          if (options.fgls_alpha == AlphaSource::breve && e == McEstimator::fgls) {
            alpha = breve().alpha->row(0).transpose();
          } else {
            alpha = alpha_two_step(panel, est).alpha->row(0).transpose();
          }
          break;
        }
        case McEstimator::breve: {
          beta = breve().beta.row(0).transpose();
          alpha = breve().alpha->row(0).transpose();
          break;
        }
      }
      out.alpha.push_back(std::move(alpha));
      out.beta.push_back(std::move(beta));
    }
    out.ok = true;
  } catch (const Error&) {
    out = ReplicationResult{};
  }
  return out;
}

McSummary run_mc(const DgpSpec& spec, const McOptions& options) {
  spec.validate();
  if (options.reps < 1) throw ConfigError("mc: need at least one replication");
  if (options.steps < 1) throw ConfigError("mc: multi-step GLS needs J >= 1");
  if (options.estimators.empty()) throw ConfigError("mc: no estimators requested");

  std::vector<ReplicationResult> results(static_cast<std::size_t>(options.reps));
  parallel_for(options.reps, options.threads, [&](int r) {
    results[static_cast<std::size_t>(r)] = run_replication(spec, options, r);
  });

  const Eigen::Index n = spec.n;
  const std::size_t n_est = options.estimators.size();
  // Per-unit sums of estimates and squared errors, accumulated in replication order.
  std::vector<Vector> sum_alpha(n_est, Vector::Zero(n));
  std::vector<Vector> sq_alpha(n_est, Vector::Zero(n));
  std::vector<Vector> sum_beta(n_est, Vector::Zero(n));
  std::vector<Vector> sq_beta(n_est, Vector::Zero(n));
  Vector beta_truth(n);
  for (Eigen::Index i = 0; i < n; ++i) beta_truth(i) = i < n / 2 ? spec.beta_low : spec.beta_high;

  McSummary summary;
  summary.n = spec.n;
  summary.t = spec.t;
  for (const ReplicationResult& rep : results) {
    if (!rep.ok) {
      ++summary.dropped;
      continue;
    }
    ++summary.reps;
    for (std::size_t e = 0; e < n_est; ++e) {
      sum_alpha[e] += rep.alpha[e];
      sq_alpha[e].array() += (rep.alpha[e].array() - spec.alpha0).square();
      sum_beta[e] += rep.beta[e];
      sq_beta[e].array() += (rep.beta[e] - beta_truth).array().square();
    }
  }
  const double drop_rate = static_cast<double>(summary.dropped) / options.reps;
  if (summary.reps == 0 || drop_rate > options.max_drop_rate) {
    throw McError("mc: " + std::to_string(summary.dropped) + " of " + std::to_string(options.reps) +
                  " replications failed");
  }

  const double mm = summary.reps;
  const Eigen::Index half = n / 2;
  for (std::size_t e = 0; e < n_est; ++e) {
    const std::string name = mc_estimator_name(options.estimators[e]);
    const Vector mean_a = sum_alpha[e] / mm;
    const Vector rmse_a = (sq_alpha[e] / mm).cwiseSqrt();
    const Vector mean_b = sum_beta[e] / mm;
    const Vector rmse_b = (sq_beta[e] / mm).cwiseSqrt();
    summary.cells.push_back({name, "alpha", spec.alpha0, mean_a.mean(), rmse_a.mean()});
    summary.cells.push_back(
        {name, "beta_low", spec.beta_low, mean_b.head(half).mean(), rmse_b.head(half).mean()});
    summary.cells.push_back(
        {name, "beta_high", spec.beta_high, mean_b.tail(n - half).mean(), rmse_b.tail(n - half).mean()});
  }
  return summary;
}

}  // namespace panelgls
