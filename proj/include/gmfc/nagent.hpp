#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gmfc/ensemble.hpp"
#include "gmfc/env.hpp"
#include "gmfc/graphon.hpp"
#include "gmfc/mfc.hpp"

namespace gmfc {

/// Symmetric interaction weights for an n-agent system. Deterministic
/// kernel weights are evaluated lazily (no n^2 storage); sampled graphs are
/// held as packed bits.
class EdgeWeights {
 public:
  static EdgeWeights from_kernel(const Graphon& g, int n);
  static EdgeWeights from_bits(EdgeBits bits);

  int size() const { return n_; }
  double at(int i, int j) const {
    if (lazy_) return graphon_.evaluate(anchors_[i], anchors_[j]);
    return bits_.at(i, j) ? 1.0 : 0.0;
  }
  bool binary() const { return !lazy_; }
  const EdgeBits& bits() const { return bits_; }
  const Graphon& kernel() const { return graphon_; }
  const std::vector<double>& anchors() const { return anchors_; }

 private:
  int n_ = 0;
  bool lazy_ = true;
  Graphon graphon_ = Graphon::erdos_renyi(0.0);
  std::vector<double> anchors_;  // i/n for 1-based agent indices
  EdgeBits bits_;
};

struct PopulationState {
  std::vector<int> states;
  EdgeWeights weights;

  int n() const { return static_cast<int>(states.size()); }
};

/// Edge-weighted empirical measure of agent i's neighborhood:
/// mass(s) = (1/N) sum_j w_ij 1{state_j = s}. Includes j = i; total <= 1.
Measure empirical_neighborhood(const PopulationState& pop, int agent,
                               int num_states);

/// Nearest-anchor block assignment: agent i (1-based) goes to the block m
/// minimizing |i/N - m/M|, ties toward the smaller block. Returns 0-based
/// block indices per agent.
std::vector<int> deploy_policy(int policy_blocks, int n);

struct EpisodeResult {
  std::vector<double> step_rewards;  // population-average reward per step
  std::vector<std::vector<int>> state_counts;  // per step, per state
  double total = 0.0;                // sum_t discount^t step_rewards[t]
  std::uint64_t seed = 0;
};

/// Debugging dump: one row per step with t, mean reward, and the state
/// histogram.
void write_episode_trace_csv(const EpisodeResult& episode,
                             const std::vector<std::string>& state_names,
                             std::ostream& out);

struct EpisodeParams {
  int n = 1;
  EdgeMode mode = EdgeMode::C1;
  int horizon = 1;
  double discount = 1.0;
  int threads = 1;
  /// When set, this edge realization replaces per-episode sampling (used to
  /// hold one C2 graph fixed across Monte Carlo runs).
  std::optional<EdgeBits> fixed_edges;
};

/// One synchronous-update episode. Initial states are drawn i.i.d. from mu0;
/// a C2 edge realization is drawn once at t=0 and held for the episode. All
/// neighborhood measures of step t are computed from the frozen time-t
/// states before any agent transitions. Bitwise reproducible per seed; the
/// RNG streams are indexed (seed, 0)=initial states, (seed, 1)=edges,
/// ((seed, 2+t), i)=agent i's action and transition draws at step t, so the
/// result does not depend on the thread count.
EpisodeResult run_episode(const EnvironmentSpec& env, const Graphon& graphon,
                          const PolicyEnsemble& pi, const Measure& mu0,
                          const EpisodeParams& params, std::uint64_t seed);

struct MonteCarloSummary {
  int runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population formula, divisor = runs
  std::vector<double> totals;
};

/// Independent episodes with seeds derive_seed(base_seed, run); runs execute
/// concurrently and are reduced in run order.
MonteCarloSummary monte_carlo(const EnvironmentSpec& env,
                              const Graphon& graphon, const PolicyEnsemble& pi,
                              const Measure& mu0, const EpisodeParams& params,
                              int runs, std::uint64_t base_seed);

struct ConvergenceRow {
  int n = 0;
  int runs = 0;
  double mc_mean = 0.0;
  double mc_std = 0.0;
  double gmfc_return = 0.0;
  double gap = 0.0;  // |mc_mean - gmfc_return|
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  // least-squares slope of log gap vs log N
};

struct StudyParams {
  std::vector<int> n_list;  // strictly increasing
  EdgeMode mode = EdgeMode::C2;
  int runs = 1000;
  int horizon = 1;
  double discount = 1.0;
  int threads = 1;
  /// false holds one sampled C2 graph fixed across the runs of each N.
  bool resample_graph = true;
};

/// Finite-agent returns against the limiting block recursion for growing N.
/// The comparator uses the kernel of pi.blocks() anchors and mu0 replicated
/// across blocks. Per-N seeds are derive_seed(base_seed, index of N).
ConvergenceTable convergence_study(const EnvironmentSpec& env,
                                   const Graphon& graphon,
                                   const PolicyEnsemble& pi,
                                   const Measure& mu0,
                                   const StudyParams& params,
                                   std::uint64_t base_seed);

/// Least-squares slope of log(y) on log(x); requires positive entries.
double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

}  // namespace gmfc
