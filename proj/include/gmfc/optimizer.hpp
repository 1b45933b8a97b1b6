#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gmfc/ensemble.hpp"
#include "gmfc/env.hpp"
#include "gmfc/graphon.hpp"
#include "gmfc/mfc.hpp"

namespace gmfc {

enum class OptimMethod { FiniteDiffAscent, CrossEntropy, ExhaustiveDeterministic };

struct OptimizerConfig {
  OptimMethod method = OptimMethod::CrossEntropy;
  int iterations = 60;
  int population = 48;      // cross-entropy candidates per iteration
  int elites = 12;          // cross-entropy refit set
  int restarts = 2;         // cross-entropy restarts
  double step_size = 0.5;   // ascent step
  double fd_epsilon = 1e-3; // central-difference stencil width
  double tolerance = 1e-9;  // stop once improvements stay below this
  std::uint64_t seed = 1;
  RewardMode mode = RewardMode::Episode;
  int threads = 1;
};

struct TracePoint {
  int iteration = 0;
  double best_return = 0.0;
  long evaluations = 0;  // cumulative rollout count
};

struct OptimizationResult {
  PolicyEnsemble best_policy;
  double best_return = 0.0;          // re-verified by a fresh rollout
  std::vector<TracePoint> trace;     // running maximum, non-decreasing
  long evaluations = 0;
};

/// Return of pi from mu0 under the requested accumulation mode.
double evaluate_policy(const EnvironmentSpec& env, const BlockKernel& kernel,
                       const DistributionEnsemble& mu0,
                       const PolicyEnsemble& pi, RewardMode mode);

/// Stationary policy-ensemble search on the deterministic block MDP.
///
/// FiniteDiffAscent: projected gradient ascent on simplex coordinates with
/// central finite differences of the return; rows are re-projected after
/// every step. CrossEntropy: logistic-normal sampling per (block, state)
/// with elite refitting; each iteration also scores the hardened (argmax)
/// mean policy. ExhaustiveDeterministic: exact search over all pure
/// ensembles; refuses when |A|^(|S| * M) exceeds 1e6. All methods include
/// the uniform baseline among scored candidates and are deterministic given
/// cfg.seed.
OptimizationResult optimize(const EnvironmentSpec& env,
                            const BlockKernel& kernel,
                            const DistributionEnsemble& mu0,
                            const OptimizerConfig& cfg);

/// Rows "m s a probability" (1-based block index) with 17 significant
/// digits.
void write_policy(const PolicyEnsemble& pi, std::ostream& out);
PolicyEnsemble read_policy(std::istream& in);

}  // namespace gmfc
