#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "gmfc/nagent.hpp"
#include "gmfc/parallel.hpp"
#include "gmfc/rng.hpp"

using namespace gmfc;

TEST_CASE("empirical_neighborhood: complete graph, homogeneous states") {
  PopulationState pop;
  pop.states = {1, 1, 1};
  pop.weights = EdgeWeights::from_kernel(Graphon::erdos_renyi(1.0), 3);
  const Measure mu = empirical_neighborhood(pop, 0, 2);
  CHECK(mu[0] == 0.0);
  CHECK(mu[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical_neighborhood: empty graph") {
  PopulationState pop;
  pop.states = {0, 1, 0};
  pop.weights = EdgeWeights::from_kernel(Graphon::erdos_renyi(0.0), 3);
  for (double v : empirical_neighborhood(pop, 1, 2)) CHECK(v == 0.0);
}

TEST_CASE("empirical_neighborhood: weighted four-agent sum") {
  PopulationState pop;
  pop.states = {0, 0, 1, 1};  // S S I I
  pop.weights = EdgeWeights::from_kernel(Graphon::erdos_renyi(0.8), 4);
  for (int i = 0; i < 4; ++i) {
    const Measure mu = empirical_neighborhood(pop, i, 2);
    CHECK(mu[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(mu[0] == doctest::Approx(0.4).epsilon(1e-12));
  }
  CHECK_THROWS_AS(empirical_neighborhood(pop, 4, 2), std::out_of_range);
}

TEST_CASE("deploy_policy: nearest-anchor assignment") {
  // grid {0.5, 1.0}: the boundary sits at i/N = 0.75
  const std::vector<int> ten = deploy_policy(2, 10);
  for (int i = 0; i < 7; ++i) CHECK(ten[i] == 0);
  for (int i = 7; i < 10; ++i) CHECK(ten[i] == 1);

  for (int b : deploy_policy(1, 13)) CHECK(b == 0);

  const std::vector<int> same = deploy_policy(5, 5);
  for (int i = 0; i < 5; ++i) CHECK(same[i] == i);
}

TEST_CASE("run_episode: single distancing agent never gets infected") {
  const EnvironmentSpec env = sis_env();
  EpisodeParams params;
  params.n = 1;
  params.mode = EdgeMode::C1;
  params.horizon = 50;
  const EpisodeResult r =
      run_episode(env, Graphon::erdos_renyi(1.0),
                  PolicyEnsemble::constant_action(1, 2, 2, 1), {1.0, 0.0},
                  params, 1234);
  CHECK(r.total == doctest::Approx(-15.0).epsilon(1e-12));
  for (double step : r.step_rewards)
    CHECK(step == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("run_episode: one step totals the first mean reward") {
  const EnvironmentSpec env = sis_env();
  EpisodeParams params;
  params.n = 12;
  params.mode = EdgeMode::C2;
  params.horizon = 1;
  const EpisodeResult r =
      run_episode(env, Graphon::erdos_renyi(0.8),
                  PolicyEnsemble::uniform(2, 2, 2), {0.5, 0.5}, params, 77);
  CHECK(r.total == r.step_rewards[0]);
  CHECK(std::abs(r.total) <= env.reward_bound);
}

TEST_CASE("run_episode: bitwise seed determinism, thread independence") {
  const EnvironmentSpec env = sis_env();
  EpisodeParams params;
  params.n = 30;
  params.mode = EdgeMode::C2;
  params.horizon = 20;
  const PolicyEnsemble pi = PolicyEnsemble::uniform(3, 2, 2);
  const EpisodeResult a =
      run_episode(env, Graphon::erdos_renyi(0.8), pi, {0.5, 0.5}, params, 42);
  const EpisodeResult b =
      run_episode(env, Graphon::erdos_renyi(0.8), pi, {0.5, 0.5}, params, 42);
  CHECK(a.total == b.total);
  CHECK(a.step_rewards == b.step_rewards);
  params.threads = 4;
  const EpisodeResult c =
      run_episode(env, Graphon::erdos_renyi(0.8), pi, {0.5, 0.5}, params, 42);
  CHECK(a.total == c.total);
  CHECK(a.step_rewards == c.step_rewards);
  const EpisodeResult d =
      run_episode(env, Graphon::erdos_renyi(0.8), pi, {0.5, 0.5}, params, 43);
  CHECK(a.total != d.total);
}

TEST_CASE("run_episode: measures are computed before anyone moves") {
  // Deterministic shift into state 1 with a reward that records the mass the
  // agent saw at state 1. At t=0 everyone is at 0, so every recorded mass
  // must be 0 even though all agents move to 1 within the same step.
  EnvironmentSpec probe;
  probe.name = "probe";
  probe.states = {"0", "1"};
  probe.actions = {"a"};
  probe.transition = [](int, const Measure&, int) {
    return std::vector<double>{0.0, 1.0};
  };
  probe.reward = [](int, const Measure& mu, int) { return mu[1]; };
  probe.reward_bound = 1.0;
  probe.transition_lipschitz = 0.0;
  probe.reward_lipschitz = 1.0;
  probe.episode_length = 2;
  probe.discount = 0.5;

  EpisodeParams params;
  params.n = 16;
  params.mode = EdgeMode::C1;
  params.horizon = 2;
  const EpisodeResult r =
      run_episode(probe, Graphon::erdos_renyi(1.0),
                  PolicyEnsemble::uniform(1, 2, 1), {1.0, 0.0}, params, 5);
  CHECK(r.step_rewards[0] == 0.0);
  CHECK(r.step_rewards[1] == 1.0);
}

TEST_CASE("monte_carlo: degenerate cases") {
  const EnvironmentSpec env = malware_env();
  EpisodeParams params;
  params.n = 8;
  params.mode = EdgeMode::C1;
  params.horizon = 10;

  const PolicyEnsemble repair = PolicyEnsemble::constant_action(2, 3, 2, 1);
  const MonteCarloSummary one = monte_carlo(env, Graphon::erdos_renyi(0.8),
                                            repair, {1.0, 0.0, 0.0}, params,
                                            1, 7);
  CHECK(one.runs == 1);
  CHECK(one.mean == one.totals[0]);
  CHECK(one.stddev == 0.0);

  // deterministic policy + point-mass start + C1 weights + one-hot dynamics:
  // every run is identical
  const MonteCarloSummary det = monte_carlo(env, Graphon::erdos_renyi(0.8),
                                            repair, {1.0, 0.0, 0.0}, params,
                                            25, 7);
  CHECK(det.stddev == 0.0);
  for (double t : det.totals) CHECK(t == det.totals[0]);
}

TEST_CASE("monte_carlo: mean and std recompute from the stored totals") {
  const EnvironmentSpec env = sis_env();
  EpisodeParams params;
  params.n = 20;
  params.mode = EdgeMode::C2;
  params.horizon = 15;
  params.threads = 4;
  const MonteCarloSummary mc =
      monte_carlo(env, Graphon::erdos_renyi(0.8),
                  PolicyEnsemble::uniform(2, 2, 2), {0.5, 0.5}, params, 200, 3);
  double mean = 0.0;
  for (double t : mc.totals) mean += t;
  mean /= mc.runs;
  double var = 0.0;
  for (double t : mc.totals) var += (t - mean) * (t - mean);
  CHECK(mc.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(mc.stddev == doctest::Approx(std::sqrt(var / mc.runs)).epsilon(1e-12));
  CHECK(mc.stddev >= 0.0);
}

TEST_CASE("monte_carlo: seed families agree within sampling error") {
  const EnvironmentSpec env = sis_env();
  EpisodeParams params;
  params.n = 40;
  params.mode = EdgeMode::C2;
  params.horizon = 50;
  params.threads = default_thread_count();
  const PolicyEnsemble pi = PolicyEnsemble::uniform(2, 2, 2);
  const MonteCarloSummary a = monte_carlo(env, Graphon::erdos_renyi(0.8), pi,
                                          {0.5, 0.5}, params, 1000, 1001);
  const MonteCarloSummary b = monte_carlo(env, Graphon::erdos_renyi(0.8), pi,
                                          {0.5, 0.5}, params, 1000, 9009);
  CHECK(std::abs(a.mean - b.mean) <= 4.0 * a.stddev / std::sqrt(1000.0));
}

TEST_CASE("one-step C2 neighborhoods average to the C1 values") {
  const int n = 50;
  const int resamples = 2000;
  const Graphon g = Graphon::erdos_renyi(0.8);

  PopulationState pop;
  pop.states.resize(n);
  for (int i = 0; i < n; ++i) pop.states[i] = i % 2;  // half S, half I
  const int infected =
      static_cast<int>(std::count(pop.states.begin(), pop.states.end(), 1));

  pop.weights = EdgeWeights::from_kernel(g, n);
  const std::vector<int> agents = {0, 17, 49};
  std::vector<double> c1_mass;
  for (int i : agents)
    c1_mass.push_back(empirical_neighborhood(pop, i, 2)[1]);

  std::vector<double> sums(agents.size(), 0.0);
  for (int r = 0; r < resamples; ++r) {
    pop.weights = EdgeWeights::from_bits(sample_edge_bits(g, n, derive_seed(54321, r)));
    for (std::size_t k = 0; k < agents.size(); ++k)
      sums[k] += empirical_neighborhood(pop, agents[k], 2)[1];
  }
  // per-draw variance of the infected mass: sum over infected neighbors of
  // p(1-p) / n^2
  const double sigma_one = std::sqrt(infected * 0.8 * 0.2) / n;
  const double sigma_mean = sigma_one / std::sqrt(resamples);
  for (std::size_t k = 0; k < agents.size(); ++k)
    CHECK(std::abs(sums[k] / resamples - c1_mass[k]) <= 3.0 * sigma_mean);
}

TEST_CASE("constant C1 weights scale the empirical state distribution") {
  Rng rng(88);
  PopulationState pop;
  pop.states.resize(24);
  for (auto& s : pop.states) s = static_cast<int>(rng.uniform() * 2);
  pop.weights = EdgeWeights::from_kernel(Graphon::erdos_renyi(0.65), 24);
  std::vector<int> histogram(2, 0);
  for (int s : pop.states) ++histogram[s];
  for (int i = 0; i < 24; ++i) {
    const Measure mu = empirical_neighborhood(pop, i, 2);
    for (int s = 0; s < 2; ++s)
      CHECK(mu[s] == doctest::Approx(0.65 * histogram[s] / 24.0)
                         .epsilon(1e-12));
  }
}

TEST_CASE("episode trace records histograms alongside rewards") {
  const EnvironmentSpec env = sis_env();
  EpisodeParams params;
  params.n = 25;
  params.mode = EdgeMode::C2;
  params.horizon = 4;
  const EpisodeResult r =
      run_episode(env, Graphon::erdos_renyi(0.8),
                  PolicyEnsemble::uniform(1, 2, 2), {0.5, 0.5}, params, 99);
  REQUIRE(r.state_counts.size() == 4);
  for (const auto& counts : r.state_counts) {
    REQUIRE(counts.size() == 2);
    CHECK(counts[0] + counts[1] == 25);
  }
  std::ostringstream out;
  write_episode_trace_csv(r, env.states, out);
  int lines = 0;
  for (char c : out.str())
    if (c == '\n') ++lines;
  CHECK(lines == 5);  // header + one row per step
}

TEST_CASE("fit_loglog_slope recovers exact power laws") {
  const std::vector<double> x = {10, 20, 40, 80, 160};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("convergence_study: gap shrinks between N=10 and N=100") {
  const EnvironmentSpec env = sis_env();
  StudyParams params;
  params.n_list = {10, 100};
  params.mode = EdgeMode::C2;
  params.runs = 400;
  params.horizon = env.episode_length;
  params.threads = default_thread_count();
  const ConvergenceTable table =
      convergence_study(env, Graphon::erdos_renyi(0.8),
                        PolicyEnsemble::uniform(2, 2, 2), {0.5, 0.5}, params,
                        246810);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1].gap < table.rows[0].gap);
  CHECK(table.rows[0].gmfc_return == table.rows[1].gmfc_return);
  CHECK(table.slope < 0.0);
}

TEST_CASE("convergence_study: rejects bad n_list") {
  const EnvironmentSpec env = sis_env();
  StudyParams params;
  params.n_list = {20, 10};
  CHECK_THROWS_AS(
      convergence_study(env, Graphon::erdos_renyi(0.8),
                        PolicyEnsemble::uniform(1, 2, 2), {0.5, 0.5}, params,
                        1),
      std::invalid_argument);
}

TEST_CASE("large-N deterministic limit: action-independent infection") {
  // beta1 = beta2 makes the dynamics policy-free; a single large C1
  // episode should sit on top of the limiting recursion.
  const EnvironmentSpec env = sis_env(0.8, 0.8, 0.3);
  const int n = 10000;
  EpisodeParams params;
  params.n = n;
  params.mode = EdgeMode::C1;
  params.horizon = env.episode_length;
  params.threads = default_thread_count();
  const PolicyEnsemble pi = PolicyEnsemble::uniform(1, 2, 2);
  const EpisodeResult episode = run_episode(env, Graphon::erdos_renyi(1.0), pi,
                                            {0.5, 0.5}, params, 8675309);
  const double limit =
      rollout(DistributionEnsemble::uniform(1, 2), pi,
              discretize(Graphon::erdos_renyi(1.0), 1), env,
              env.episode_length, 1.0)
          .return_value;
  CHECK(std::abs(episode.total - limit) < 0.05 * env.reward_bound);
}
