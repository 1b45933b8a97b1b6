#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "gmfc/mfc.hpp"
#include "gmfc/rng.hpp"

using namespace gmfc;

namespace {

DistributionEnsemble random_ensemble(Rng& rng, int blocks, int states) {
  DistributionEnsemble e(blocks, states);
  for (int m = 0; m < blocks; ++m) {
    double sum = 0.0;
    for (int s = 0; s < states; ++s) {
      e.at(m, s) = -std::log(1.0 - rng.uniform());
      sum += e.at(m, s);
    }
    for (int s = 0; s < states; ++s) e.at(m, s) /= sum;
  }
  return e;
}

PolicyEnsemble random_policy(Rng& rng, int blocks, int states, int actions) {
  PolicyEnsemble p(blocks, states, actions);
  for (int m = 0; m < blocks; ++m)
    for (int s = 0; s < states; ++s) {
      double sum = 0.0;
      for (int a = 0; a < actions; ++a) {
        p.at(m, s, a) = -std::log(1.0 - rng.uniform());
        sum += p.at(m, s, a);
      }
      for (int a = 0; a < actions; ++a) p.at(m, s, a) /= sum;
    }
  return p;
}

}  // namespace

TEST_CASE("neighborhood_measure: constant kernel averages the blocks") {
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 3);
  DistributionEnsemble mu(3, 2);
  for (int m = 0; m < 3; ++m) {
    mu.at(m, 0) = 0.5;
    mu.at(m, 1) = 0.5;
  }
  for (int m = 0; m < 3; ++m) {
    const Measure nu = neighborhood_measure(mu, k, m);
    CHECK(nu[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(nu[1] == doctest::Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("neighborhood_measure: zero kernel kills all mass") {
  const BlockKernel k = discretize(Graphon::step({{0.0}}), 4);
  Rng rng(5);
  const DistributionEnsemble mu = random_ensemble(rng, 4, 3);
  for (int m = 0; m < 4; ++m)
    for (double v : neighborhood_measure(mu, k, m)) CHECK(v == 0.0);
}

TEST_CASE("neighborhood_measure: two-block hand computation") {
  const BlockKernel k =
      discretize(Graphon::stochastic_block(0.9, 0.4, 0.5), 2);
  DistributionEnsemble mu(2, 2);
  mu.at(0, 1) = 1.0;  // first block all infected
  mu.at(1, 0) = 1.0;  // second block all susceptible
  const Measure nu = neighborhood_measure(mu, k, 0);
  CHECK(nu[1] == doctest::Approx(0.45).epsilon(1e-12));  // (1/2) * 0.9
  CHECK(nu[0] == doctest::Approx(0.20).epsilon(1e-12));  // (1/2) * 0.4
  CHECK(total_mass(nu) <= 1.0);
}

TEST_CASE("neighborhood_measure: dimension checks") {
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.5), 3);
  const DistributionEnsemble mu(2, 2);
  CHECK_THROWS_AS(neighborhood_measure(mu, k, 0), std::invalid_argument);
  const DistributionEnsemble ok = DistributionEnsemble::uniform(3, 2);
  CHECK_THROWS_AS(neighborhood_measure(ok, k, 3), std::invalid_argument);
}

TEST_CASE("aggregated_reward: healthy contacts cost nothing") {
  const EnvironmentSpec env = sis_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 4);
  const DistributionEnsemble all_s = DistributionEnsemble::point_mass(4, 2, 0);
  const PolicyEnsemble contact = PolicyEnsemble::constant_action(4, 2, 2, 0);
  CHECK(aggregated_reward(all_s, contact, k, env) == 0.0);
}

TEST_CASE("aggregated_reward: all infected under contact") {
  const EnvironmentSpec env = sis_env();
  for (const Graphon& g :
       {Graphon::erdos_renyi(0.8), Graphon::stochastic_block(0.9, 0.4, 0.5)}) {
    const BlockKernel k = discretize(g, 3);
    const DistributionEnsemble all_i =
        DistributionEnsemble::point_mass(3, 2, 1);
    const PolicyEnsemble contact = PolicyEnsemble::constant_action(3, 2, 2, 0);
    CHECK(aggregated_reward(all_i, contact, k, env) ==
          doctest::Approx(-2.5).epsilon(1e-12));
  }
}

TEST_CASE("aggregated_reward: malware triple sum") {
  const EnvironmentSpec env = malware_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 2);
  const DistributionEnsemble mu = DistributionEnsemble::uniform(2, 3);
  const PolicyEnsemble idle = PolicyEnsemble::constant_action(2, 3, 2, 0);
  CHECK(aggregated_reward(mu, idle, k, env) ==
        doctest::Approx(-1.1 / 3.0).epsilon(1e-12));
}

TEST_CASE("aggregated_transition: SIS distancing step") {
  const EnvironmentSpec env = sis_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 3);
  DistributionEnsemble mu(3, 2);
  for (int m = 0; m < 3; ++m) mu.at(m, 0) = mu.at(m, 1) = 0.5;
  const PolicyEnsemble nc = PolicyEnsemble::constant_action(3, 2, 2, 1);
  const DistributionEnsemble next = aggregated_transition(mu, nc, k, env);
  for (int m = 0; m < 3; ++m) {
    CHECK(next.at(m, 0) == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(next.at(m, 1) == doctest::Approx(0.35).epsilon(1e-12));
  }
}

TEST_CASE("aggregated_transition: repair resets every block") {
  const EnvironmentSpec env = malware_env();
  const BlockKernel k = discretize(Graphon::random_geometric(), 4);
  Rng rng(11);
  const DistributionEnsemble mu = random_ensemble(rng, 4, 3);
  const PolicyEnsemble repair = PolicyEnsemble::constant_action(4, 3, 2, 1);
  const DistributionEnsemble next = aggregated_transition(mu, repair, k, env);
  for (int m = 0; m < 4; ++m) {
    CHECK(next.at(m, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(next.at(m, 1) == 0.0);
    CHECK(next.at(m, 2) == 0.0);
  }
}

TEST_CASE("aggregated_transition: absorbing infected state when delta = 0") {
  const EnvironmentSpec env = sis_env(0.8, 0.0, 0.0);
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 2);
  const DistributionEnsemble all_i = DistributionEnsemble::point_mass(2, 2, 1);
  const PolicyEnsemble nc = PolicyEnsemble::constant_action(2, 2, 2, 1);
  const DistributionEnsemble next = aggregated_transition(all_i, nc, k, env);
  for (int m = 0; m < 2; ++m) CHECK(next.at(m, 1) == 1.0);
}

TEST_CASE("rollout: single step equals the aggregated reward") {
  const EnvironmentSpec env = sis_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 2);
  const DistributionEnsemble mu = DistributionEnsemble::uniform(2, 2);
  const PolicyEnsemble pi = PolicyEnsemble::uniform(2, 2, 2);
  const MeanFieldTrajectory traj = rollout(mu, pi, k, env, 1, 0.95);
  CHECK(traj.return_value == aggregated_reward(mu, pi, k, env));
  CHECK(traj.states.size() == 2);
}

TEST_CASE("rollout: constant-graphon SIS collapses to a scalar recursion") {
  const EnvironmentSpec env = sis_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 4);
  const DistributionEnsemble mu0 = DistributionEnsemble::uniform(4, 2);
  const PolicyEnsemble nc = PolicyEnsemble::constant_action(4, 2, 2, 1);
  const MeanFieldTrajectory traj = rollout(mu0, nc, k, env, 50, 0.95);

  // distancing with beta2 = 0: infected mass decays by (1 - delta); the
  // per-step reward is (1-i)(-c2) + i(-c1-c2) = -0.3 - 2 i
  double infected = 0.5, expected = 0.0, factor = 1.0;
  for (int t = 0; t < 50; ++t) {
    expected += factor * (-0.3 - 2.0 * infected);
    infected *= 0.7;
    factor *= 0.95;
  }
  CHECK(traj.return_value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("rollout: malware always-repair hand recursion") {
  const EnvironmentSpec env = malware_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 2);
  const DistributionEnsemble mu0 = DistributionEnsemble::uniform(2, 3);
  const PolicyEnsemble repair = PolicyEnsemble::constant_action(2, 3, 2, 1);
  const MeanFieldTrajectory traj = rollout(mu0, repair, k, env, 10, 0.95);

  // t = 0: uniform levels, <nu> = 0.8; afterwards all mass sits at level 0
  // and only the repair cost accrues.
  double expected = -0.5 - (1.1 / 3.0);
  double factor = 0.95;
  for (int t = 1; t < 10; ++t) {
    expected += factor * -0.5;
    factor *= 0.95;
  }
  CHECK(traj.return_value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rollout: probability conservation along trajectories") {
  Rng rng(71);
  for (const EnvironmentSpec& env : {sis_env(), malware_env()}) {
    const BlockKernel k = discretize(Graphon::stochastic_block(0.9, 0.4, 0.5), 5);
    const DistributionEnsemble mu0 =
        random_ensemble(rng, 5, env.num_states());
    const PolicyEnsemble pi =
        random_policy(rng, 5, env.num_states(), env.num_actions());
    const MeanFieldTrajectory traj = rollout(mu0, pi, k, env, 30, 1.0);
    for (const DistributionEnsemble& mu : traj.states) {
      for (int m = 0; m < mu.blocks(); ++m) {
        double sum = 0.0;
        for (int s = 0; s < mu.states(); ++s) {
          CHECK(mu.at(m, s) >= 0.0);
          sum += mu.at(m, s);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
      for (int m = 0; m < mu.blocks(); ++m) {
        const double mass = total_mass(neighborhood_measure(mu, k, m));
        CHECK(mass >= 0.0);
        CHECK(mass <= 1.0 + 1e-9);
      }
    }
    for (double r : traj.step_rewards)
      CHECK(std::abs(r) <= env.reward_bound + 1e-12);
  }
}

TEST_CASE("rollout: constant graphon makes the block count irrelevant") {
  const EnvironmentSpec env = sis_env();
  const Graphon g = Graphon::erdos_renyi(0.8);
  PolicyEnsemble pi1(1, 2, 2);
  pi1.at(0, 0, 0) = 0.3;
  pi1.at(0, 0, 1) = 0.7;
  pi1.at(0, 1, 0) = 0.6;
  pi1.at(0, 1, 1) = 0.4;
  PolicyEnsemble pi8(8, 2, 2);
  for (int m = 0; m < 8; ++m)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) pi8.at(m, s, a) = pi1.at(0, s, a);

  const MeanFieldTrajectory t1 = rollout(DistributionEnsemble::uniform(1, 2),
                                         pi1, discretize(g, 1), env, 50, 1.0);
  const MeanFieldTrajectory t8 = rollout(DistributionEnsemble::uniform(8, 2),
                                         pi8, discretize(g, 8), env, 50, 1.0);
  for (std::size_t t = 0; t < t1.states.size(); ++t)
    for (int m = 0; m < 8; ++m)
      for (int s = 0; s < 2; ++s)
        CHECK(std::abs(t8.states[t].at(m, s) - t1.states[t].at(0, s)) <=
              1e-12);
  CHECK(std::abs(t8.return_value - t1.return_value) <= 1e-12);
}

TEST_CASE("rollout: deterministic, bit-for-bit") {
  const EnvironmentSpec env = malware_env();
  const BlockKernel k = discretize(Graphon::random_geometric(), 3);
  Rng rng(10);
  const DistributionEnsemble mu0 = random_ensemble(rng, 3, 3);
  const PolicyEnsemble pi = random_policy(rng, 3, 3, 2);
  const MeanFieldTrajectory a = rollout(mu0, pi, k, env, 10, 0.95);
  const MeanFieldTrajectory b = rollout(mu0, pi, k, env, 10, 0.95);
  CHECK(a.return_value == b.return_value);
  CHECK(a.step_rewards == b.step_rewards);
  for (std::size_t t = 0; t < a.states.size(); ++t)
    CHECK(a.states[t] == b.states[t]);
}

TEST_CASE("one-step expansion never exceeds 1 + L_P") {
  Rng rng(55);
  for (const EnvironmentSpec& env : {sis_env(), malware_env()}) {
    const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 4);
    const PolicyEnsemble pi =
        random_policy(rng, 4, env.num_states(), env.num_actions());
    for (int trial = 0; trial < 100; ++trial) {
      const DistributionEnsemble a = random_ensemble(rng, 4, env.num_states());
      const DistributionEnsemble b = random_ensemble(rng, 4, env.num_states());
      const double before = l1_distance(a, b);
      if (before < 1e-12) continue;
      const double after = l1_distance(aggregated_transition(a, pi, k, env),
                                       aggregated_transition(b, pi, k, env));
      CHECK(after / before <= 1.0 + env.transition_lipschitz + 1e-9);
    }
  }
}

TEST_CASE("effective_horizon bounds the truncated tail") {
  const EnvironmentSpec env = sis_env();
  const int t = effective_horizon(env, 1e-6);
  CHECK(t >= env.episode_length);
  CHECK(std::pow(env.discount, t) * env.reward_bound / (1.0 - env.discount) <=
        1e-6);
  CHECK(std::pow(env.discount, t - 1) * env.reward_bound /
            (1.0 - env.discount) >
        1e-6);
}

TEST_CASE("bellman_apply: zero and constant tables") {
  const EnvironmentSpec env = sis_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 2);
  Rng rng(21);
  const DistributionEnsemble mu = random_ensemble(rng, 2, 2);
  const PolicyEnsemble pi = random_policy(rng, 2, 2, 2);
  const std::vector<PolicyEnsemble> candidates = {
      PolicyEnsemble::uniform(2, 2, 2), random_policy(rng, 2, 2, 2)};

  TabulatedQ zero;
  zero.entries.push_back({DistributionEnsemble::uniform(2, 2),
                          PolicyEnsemble::uniform(2, 2, 2), 0.0});
  CHECK(bellman_apply(zero, mu, pi, candidates, k, env) ==
        doctest::Approx(aggregated_reward(mu, pi, k, env)).epsilon(1e-12));

  TabulatedQ constant;
  constant.entries.push_back({DistributionEnsemble::uniform(2, 2),
                              PolicyEnsemble::uniform(2, 2, 2), -3.25});
  CHECK(bellman_apply(constant, mu, pi, candidates, k, env) ==
        doctest::Approx(aggregated_reward(mu, pi, k, env) +
                        env.discount * -3.25)
            .epsilon(1e-12));

  CHECK_THROWS_AS(bellman_apply(zero, mu, pi, {}, k, env),
                  std::invalid_argument);
}

TEST_CASE("bellman_apply contracts in the table values") {
  const EnvironmentSpec env = sis_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 2);
  Rng rng(77);
  const double q_bound = env.reward_bound / (1.0 - env.discount);

  std::vector<PolicyEnsemble> candidates;
  for (int c = 0; c < 4; ++c) candidates.push_back(random_policy(rng, 2, 2, 2));

  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    TabulatedQ q1, q2;
    for (int e = 0; e < 12; ++e) {
      TabulatedQ::Entry entry;
      entry.mu = random_ensemble(rng, 2, 2);
      entry.pi = random_policy(rng, 2, 2, 2);
      entry.value = rng.uniform(-q_bound, q_bound);
      q1.entries.push_back(entry);
      entry.value = rng.uniform(-q_bound, q_bound);
      q2.entries.push_back(entry);
    }
    double table_gap = 0.0;
    for (std::size_t e = 0; e < q1.entries.size(); ++e)
      table_gap = std::max(table_gap, std::abs(q1.entries[e].value -
                                               q2.entries[e].value));
    double apply_gap = 0.0;
    for (int probe = 0; probe < 20; ++probe) {
      const DistributionEnsemble mu = random_ensemble(rng, 2, 2);
      const PolicyEnsemble pi = random_policy(rng, 2, 2, 2);
      apply_gap = std::max(
          apply_gap, std::abs(bellman_apply(q1, mu, pi, candidates, k, env) -
                              bellman_apply(q2, mu, pi, candidates, k, env)));
    }
    worst = std::max(worst, apply_gap / table_gap);
  }
  CHECK(worst <= env.discount + 1e-9);
}

TEST_CASE("trajectory CSV layout") {
  const EnvironmentSpec env = sis_env();
  const BlockKernel k = discretize(Graphon::erdos_renyi(0.8), 2);
  const MeanFieldTrajectory traj =
      rollout(DistributionEnsemble::uniform(2, 2),
              PolicyEnsemble::uniform(2, 2, 2), k, env, 3, 1.0);
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  int lines = 0;
  for (char c : out.str())
    if (c == '\n') ++lines;
  CHECK(lines == 1 + 4 * 2 * 2);  // header + (T+1) * blocks * states
}
