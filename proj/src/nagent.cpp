#include "gmfc/nagent.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gmfc/parallel.hpp"
#include "gmfc/rng.hpp"

namespace gmfc {

EdgeWeights EdgeWeights::from_kernel(const Graphon& g, int n) {
  if (n < 1) throw std::invalid_argument("agent count must be >= 1");
  EdgeWeights w;
  w.n_ = n;
  w.lazy_ = true;
  w.graphon_ = g;
  w.anchors_.resize(n);
  for (int i = 0; i < n; ++i)
    w.anchors_[i] = static_cast<double>(i + 1) / n;
  return w;
}

EdgeWeights EdgeWeights::from_bits(EdgeBits bits) {
  EdgeWeights w;
  w.n_ = bits.size();
  w.lazy_ = false;
  w.bits_ = std::move(bits);
  return w;
}

Measure empirical_neighborhood(const PopulationState& pop, int agent,
                               int num_states) {
  const int n = pop.n();
  if (agent < 0 || agent >= n)
    throw std::out_of_range("agent index out of range");
  Measure mu(num_states, 0.0);
  if (pop.weights.binary()) {
    const EdgeBits& bits = pop.weights.bits();
    for (int j = 0; j < n; ++j)
      if (bits.at(agent, j)) mu[pop.states[j]] += 1.0;
  } else {
    for (int j = 0; j < n; ++j)
      mu[pop.states[j]] += pop.weights.at(agent, j);
  }
  for (auto& v : mu) v /= n;
  return mu;
}

std::vector<int> deploy_policy(int policy_blocks, int n) {
  if (policy_blocks < 1 || n < 1)
    throw std::invalid_argument("block and agent counts must be >= 1");
  std::vector<int> assignment(n);
  for (int i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i + 1) / n;
    int best = 0;
    double best_dist = std::abs(pos - 1.0 / policy_blocks);
    for (int m = 1; m < policy_blocks; ++m) {
      const double d = std::abs(pos - static_cast<double>(m + 1) / policy_blocks);
      if (d < best_dist) {  // strict: ties stay with the smaller block
        best_dist = d;
        best = m;
      }
    }
    assignment[i] = best;
  }
  return assignment;
}

namespace {

// Same layout as empirical_neighborhood, but sized by the environment and
// writing into a caller-owned buffer (the episode hot path).
void neighborhood_into(const PopulationState& pop, int agent, Measure& mu) {
  const int n = pop.n();
  std::fill(mu.begin(), mu.end(), 0.0);
  if (pop.weights.binary()) {
    const EdgeBits& bits = pop.weights.bits();
    for (int j = 0; j < n; ++j)
      if (bits.at(agent, j)) mu[pop.states[j]] += 1.0;
  } else {
    const Graphon& g = pop.weights.kernel();
    const std::vector<double>& anchors = pop.weights.anchors();
    const double alpha = anchors[agent];
    for (int j = 0; j < n; ++j)
      mu[pop.states[j]] += g.evaluate(alpha, anchors[j]);
  }
  for (auto& v : mu) v /= n;
}

}  // namespace

EpisodeResult run_episode(const EnvironmentSpec& env, const Graphon& graphon,
                          const PolicyEnsemble& pi, const Measure& mu0,
                          const EpisodeParams& params, std::uint64_t seed) {
  const int n = params.n;
  if (n < 1) throw std::invalid_argument("agent count must be >= 1");
  if (params.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (static_cast<int>(mu0.size()) != env.num_states())
    throw std::invalid_argument("mu0/environment state mismatch");
  if (pi.states() != env.num_states() || pi.actions() != env.num_actions())
    throw std::invalid_argument("policy/environment dimension mismatch");

  PopulationState pop;
  pop.states.resize(n);
  {
    Rng init(derive_seed(seed, 0));
    for (int i = 0; i < n; ++i) pop.states[i] = init.categorical(mu0);
  }
  if (params.fixed_edges) {
    if (params.fixed_edges->size() != n)
      throw std::invalid_argument("fixed edge realization size mismatch");
    pop.weights = EdgeWeights::from_bits(*params.fixed_edges);
  } else if (params.mode == EdgeMode::C2) {
    pop.weights =
        EdgeWeights::from_bits(sample_edge_bits(graphon, n, derive_seed(seed, 1)));
  } else {
    pop.weights = EdgeWeights::from_kernel(graphon, n);
  }

  const std::vector<int> block_of = deploy_policy(pi.blocks(), n);
  const int states = env.num_states();

  EpisodeResult result;
  result.seed = seed;
  result.step_rewards.reserve(params.horizon);
  result.state_counts.reserve(params.horizon);
  std::vector<int> next_states(n);
  std::vector<double> rewards(n);
  double factor = 1.0;
  for (int t = 0; t < params.horizon; ++t) {
    std::vector<int> counts(states, 0);
    for (int s : pop.states) ++counts[s];
    result.state_counts.push_back(std::move(counts));
    const std::uint64_t step_seed = derive_seed(seed, 2 + t);
    parallel_for(n, params.threads, [&](std::int64_t i) {
      Measure mu(states, 0.0);
      neighborhood_into(pop, static_cast<int>(i), mu);
      Rng rng(derive_seed(step_seed, i));
      const int s = pop.states[i];
      const int a = rng.categorical(pi.row(block_of[i], s));
      rewards[i] = env.reward(s, mu, a);
      const std::vector<double> row = env.transition(s, mu, a);
      next_states[i] = rng.categorical(row);
    });
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += rewards[i];  // fixed reduction order
    mean /= n;
    if (std::abs(mean) > env.reward_bound + 1e-9)
      throw std::runtime_error("population reward escaped the declared bound");
    result.step_rewards.push_back(mean);
    result.total += factor * mean;
    factor *= params.discount;
    pop.states.swap(next_states);
  }
  return result;
}

MonteCarloSummary monte_carlo(const EnvironmentSpec& env,
                              const Graphon& graphon, const PolicyEnsemble& pi,
                              const Measure& mu0, const EpisodeParams& params,
                              int runs, std::uint64_t base_seed) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  MonteCarloSummary summary;
  summary.runs = runs;
  summary.totals.resize(runs);

  // Parallelize across runs; each episode stays single-threaded.
  EpisodeParams episode = params;
  episode.threads = 1;
  parallel_for(runs, params.threads, [&](std::int64_t r) {
    summary.totals[r] =
        run_episode(env, graphon, pi, mu0, episode, derive_seed(base_seed, r))
            .total;
  });

  double mean = 0.0;
  for (double v : summary.totals) mean += v;
  mean /= runs;
  double var = 0.0;
  for (double v : summary.totals) var += (v - mean) * (v - mean);
  summary.mean = mean;
  summary.stddev = std::sqrt(var / runs);
  return summary;
}

ConvergenceTable convergence_study(const EnvironmentSpec& env,
                                   const Graphon& graphon,
                                   const PolicyEnsemble& pi,
                                   const Measure& mu0,
                                   const StudyParams& params,
                                   std::uint64_t base_seed) {
  if (params.n_list.empty())
    throw std::invalid_argument("n_list must be non-empty");
  for (std::size_t i = 1; i < params.n_list.size(); ++i)
    if (params.n_list[i] <= params.n_list[i - 1])
      throw std::invalid_argument("n_list must be strictly increasing");

  const BlockKernel kernel = discretize(graphon, pi.blocks());
  const DistributionEnsemble mu0_blocks =
      DistributionEnsemble::replicate(mu0, pi.blocks());
  const double limit =
      rollout(mu0_blocks, pi, kernel, env, params.horizon, params.discount)
          .return_value;

  ConvergenceTable table;
  table.rows.reserve(params.n_list.size());
  for (std::size_t k = 0; k < params.n_list.size(); ++k) {
    EpisodeParams episode;
    episode.n = params.n_list[k];
    episode.mode = params.mode;
    episode.horizon = params.horizon;
    episode.discount = params.discount;
    episode.threads = params.threads;
    const std::uint64_t n_seed = derive_seed(base_seed, k);
    if (!params.resample_graph && params.mode == EdgeMode::C2)
      episode.fixed_edges =
          sample_edge_bits(graphon, episode.n, derive_seed(n_seed, 1));
    const MonteCarloSummary mc =
        monte_carlo(env, graphon, pi, mu0, episode, params.runs, n_seed);
    ConvergenceRow row;
    row.n = episode.n;
    row.runs = params.runs;
    row.mc_mean = mc.mean;
    row.mc_std = mc.stddev;
    row.gmfc_return = limit;
    row.gap = std::abs(mc.mean - limit);
    table.rows.push_back(row);
  }

  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    xs.push_back(row.n);
    ys.push_back(std::max(row.gap, 1e-300));  // guard exact zeros
  }
  table.slope = fit_loglog_slope(xs, ys);
  return table;
}

void write_episode_trace_csv(const EpisodeResult& episode,
                             const std::vector<std::string>& state_names,
                             std::ostream& out) {
  out << "t,mean_reward";
  for (const std::string& s : state_names) out << ",count_" << s;
  out << '\n';
  for (std::size_t t = 0; t < episode.step_rewards.size(); ++t) {
    out << t << ',' << episode.step_rewards[t];
    for (int c : episode.state_counts[t]) out << ',' << c;
    out << '\n';
  }
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs >= 2 points");
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("slope fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gmfc
