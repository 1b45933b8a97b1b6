#include "gmfc/mfc.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gmfc {

namespace {

void check_dimensions(const DistributionEnsemble& mu, const BlockKernel& kernel,
                      const EnvironmentSpec& env) {
  if (mu.blocks() != kernel.blocks)
    throw std::invalid_argument("ensemble/kernel block mismatch");
  if (mu.states() != env.num_states())
    throw std::invalid_argument("ensemble/environment state mismatch");
}

void check_dimensions(const DistributionEnsemble& mu, const PolicyEnsemble& pi,
                      const BlockKernel& kernel, const EnvironmentSpec& env) {
  check_dimensions(mu, kernel, env);
  if (pi.blocks() != mu.blocks() || pi.states() != mu.states() ||
      pi.actions() != env.num_actions())
    throw std::invalid_argument("policy ensemble dimension mismatch");
}

}  // namespace

Measure neighborhood_measure(const DistributionEnsemble& mu,
                             const BlockKernel& kernel, int m) {
  if (mu.blocks() != kernel.blocks)
    throw std::invalid_argument("ensemble/kernel block mismatch");
  if (m < 0 || m >= kernel.blocks)
    throw std::invalid_argument("block index out of range");
  const int blocks = mu.blocks();
  const int states = mu.states();
  Measure nu(states, 0.0);
  for (int mp = 0; mp < blocks; ++mp) {
    const double w = kernel.at(m, mp);
    if (w == 0.0) continue;
    const auto block = mu.block(mp);
    for (int s = 0; s < states; ++s) nu[s] += w * block[s];
  }
  const double inv = 1.0 / blocks;
  for (auto& v : nu) v *= inv;
  return nu;
}

double aggregated_reward(const DistributionEnsemble& mu,
                         const PolicyEnsemble& pi, const BlockKernel& kernel,
                         const EnvironmentSpec& env) {
  check_dimensions(mu, pi, kernel, env);
  const int blocks = mu.blocks();
  const int states = mu.states();
  const int actions = pi.actions();
  double total = 0.0;
  for (int m = 0; m < blocks; ++m) {
    const Measure nu = neighborhood_measure(mu, kernel, m);
    for (int s = 0; s < states; ++s) {
      const double mass = mu.at(m, s);
      if (mass == 0.0) continue;
      for (int a = 0; a < actions; ++a) {
        const double weight = mass * pi.at(m, s, a);
        if (weight == 0.0) continue;
        total += env.reward(s, nu, a) * weight;
      }
    }
  }
  return total / blocks;
}

DistributionEnsemble aggregated_transition(const DistributionEnsemble& mu,
                                           const PolicyEnsemble& pi,
                                           const BlockKernel& kernel,
                                           const EnvironmentSpec& env) {
  check_dimensions(mu, pi, kernel, env);
  const int blocks = mu.blocks();
  const int states = mu.states();
  const int actions = pi.actions();
  DistributionEnsemble next(blocks, states);
  for (int m = 0; m < blocks; ++m) {
    const Measure nu = neighborhood_measure(mu, kernel, m);
    for (int s = 0; s < states; ++s) {
      const double mass = mu.at(m, s);
      if (mass == 0.0) continue;
      for (int a = 0; a < actions; ++a) {
        const double weight = mass * pi.at(m, s, a);
        if (weight == 0.0) continue;
        const std::vector<double> row = env.transition(s, nu, a);
        for (int sp = 0; sp < states; ++sp) next.at(m, sp) += weight * row[sp];
      }
    }
  }
  next.validate(1e-9);
  return next;
}

MeanFieldTrajectory rollout(const DistributionEnsemble& mu0,
                            const PolicyEnsemble& pi,
                            const BlockKernel& kernel,
                            const EnvironmentSpec& env, int horizon,
                            double discount) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  check_dimensions(mu0, pi, kernel, env);
  mu0.validate(1e-9);
  pi.validate(1e-9);

  MeanFieldTrajectory traj;
  traj.discount = discount;
  traj.states.reserve(horizon + 1);
  traj.step_rewards.reserve(horizon);
  traj.states.push_back(mu0);
  double factor = 1.0;
  for (int t = 0; t < horizon; ++t) {
    const DistributionEnsemble& cur = traj.states.back();
    const double r = aggregated_reward(cur, pi, kernel, env);
    traj.step_rewards.push_back(r);
    traj.return_value += factor * r;
    factor *= discount;
    traj.states.push_back(aggregated_transition(cur, pi, kernel, env));
  }
  return traj;
}

int effective_horizon(const EnvironmentSpec& env, double epsilon) {
  const double gamma = env.discount;
  const double m_r = env.reward_bound;
  if (m_r <= 0.0) return env.episode_length;
  const double t =
      std::log(epsilon * (1.0 - gamma) / m_r) / std::log(gamma);
  const int tail = static_cast<int>(std::ceil(t));
  return std::max(env.episode_length, tail);
}

void write_trajectory_csv(const MeanFieldTrajectory& traj, std::ostream& out) {
  out << "t,block,state,mass,step_reward\n";
  const int horizon = static_cast<int>(traj.step_rewards.size());
  for (int t = 0; t <= horizon; ++t) {
    const DistributionEnsemble& mu = traj.states[t];
    for (int m = 0; m < mu.blocks(); ++m)
      for (int s = 0; s < mu.states(); ++s) {
        out << t << ',' << m + 1 << ',' << s << ',' << mu.at(m, s) << ',';
        if (t < horizon) out << traj.step_rewards[t];
        out << '\n';
      }
  }
}

double TabulatedQ::lookup(const DistributionEnsemble& mu,
                          const PolicyEnsemble& pi) const {
  if (entries.empty()) throw std::invalid_argument("empty value table");
  double best = std::numeric_limits<double>::infinity();
  double value = 0.0;
  for (const Entry& e : entries) {
    const double d = l1_distance(e.mu, mu) + l1_distance(e.pi, pi);
    if (d < best) {
      best = d;
      value = e.value;
    }
  }
  return value;
}

double bellman_apply(const TabulatedQ& q, const DistributionEnsemble& mu,
                     const PolicyEnsemble& pi,
                     std::span<const PolicyEnsemble> candidates,
                     const BlockKernel& kernel, const EnvironmentSpec& env) {
  if (candidates.empty())
    throw std::invalid_argument("bellman_apply: empty candidate set");
  const double r = aggregated_reward(mu, pi, kernel, env);
  const DistributionEnsemble next = aggregated_transition(mu, pi, kernel, env);
  double best = -std::numeric_limits<double>::infinity();
  for (const PolicyEnsemble& cand : candidates)
    best = std::max(best, q.lookup(next, cand));
  return r + env.discount * best;
}

}  // namespace gmfc
