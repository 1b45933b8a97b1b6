#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "gmfc/ensemble.hpp"
#include "gmfc/env.hpp"
#include "gmfc/graphon.hpp"

namespace gmfc {

/// How returns are accumulated: the undiscounted sum over the episode, or
/// the discounted sum over an effective horizon long enough to bound the
/// truncated tail.
enum class RewardMode { Episode, Discounted };

/// Graphon-weighted average of the block distributions seen from block m:
/// (1/M) sum_m' W(a_m, a_m') mu^{m'}. A sub-probability measure.
Measure neighborhood_measure(const DistributionEnsemble& mu,
                             const BlockKernel& kernel, int m);

/// Population-average one-step reward:
/// (1/M) sum_m sum_s sum_a r(s, nu_m, a) mu^m(s) pi^m(a|s).
double aggregated_reward(const DistributionEnsemble& mu,
                         const PolicyEnsemble& pi, const BlockKernel& kernel,
                         const EnvironmentSpec& env);

/// Deterministic pushforward of the ensemble:
/// block m maps to sum_s sum_a P(.|s, nu_m, a) mu^m(s) pi^m(a|s).
DistributionEnsemble aggregated_transition(const DistributionEnsemble& mu,
                                           const PolicyEnsemble& pi,
                                           const BlockKernel& kernel,
                                           const EnvironmentSpec& env);

struct MeanFieldTrajectory {
  std::vector<DistributionEnsemble> states;  // horizon + 1 ensembles
  std::vector<double> step_rewards;          // aggregated reward per step
  double discount = 1.0;
  double return_value = 0.0;  // sum_t discount^t step_rewards[t]
};

/// Iterates the deterministic recursion for `horizon` steps under a fixed
/// stationary policy ensemble. Pure; bitwise reproducible.
MeanFieldTrajectory rollout(const DistributionEnsemble& mu0,
                            const PolicyEnsemble& pi,
                            const BlockKernel& kernel,
                            const EnvironmentSpec& env, int horizon,
                            double discount);

/// Smallest horizon T >= episode_length with
/// discount^T * M_r / (1 - discount) <= epsilon.
int effective_horizon(const EnvironmentSpec& env, double epsilon = 1e-6);

/// t, block, state, mass, step reward per row.
void write_trajectory_csv(const MeanFieldTrajectory& traj, std::ostream& out);

/// Value table over explicit (ensemble, policy) grid points with
/// nearest-neighbor lookup in the summed L1 metric. Test harness for the
/// fixed-point operator; the production optimizer works on returns directly.
struct TabulatedQ {
  struct Entry {
    DistributionEnsemble mu;
    PolicyEnsemble pi;
    double value = 0.0;
  };
  std::vector<Entry> entries;

  double lookup(const DistributionEnsemble& mu, const PolicyEnsemble& pi) const;
};

/// One application of the fixed-point operator at (mu, pi):
/// R(mu, pi) + discount * max over candidate policies of
/// q(pushforward(mu, pi), candidate). Throws on an empty candidate set.
double bellman_apply(const TabulatedQ& q, const DistributionEnsemble& mu,
                     const PolicyEnsemble& pi,
                     std::span<const PolicyEnsemble> candidates,
                     const BlockKernel& kernel, const EnvironmentSpec& env);

}  // namespace gmfc
