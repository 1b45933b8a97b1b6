#include "gmfc/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmfc/rng.hpp"

namespace gmfc {

double total_mass(const Measure& mu) {
  double s = 0.0;
  for (double v : mu) s += v;
  return s;
}

double l1_distance(const Measure& a, const Measure& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

EnvironmentSpec sis_env(double beta1, double beta2, double delta, double c1,
                        double c2, double c3, int episode_length,
                        double discount) {
  if (!(beta1 >= 0.0 && beta1 <= 1.0 && beta2 >= 0.0 && beta2 <= beta1))
    throw std::invalid_argument("require 0 <= beta2 <= beta1 <= 1");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta must lie in [0,1]");
  if (c1 < 0.0 || c2 < 0.0 || c3 < 0.0)
    throw std::invalid_argument("costs must be non-negative");
  if (episode_length < 1)
    throw std::invalid_argument("episode_length must be >= 1");
  if (!(discount > 0.0 && discount < 1.0))
    throw std::invalid_argument("discount must lie in (0,1)");

  EnvironmentSpec env;
  env.name = "sis";
  env.states = {"S", "I"};
  env.actions = {"C", "NC"};
  env.transition = [beta1, beta2, delta](int s, const Measure& mu,
                                         int a) -> std::vector<double> {
    if (s == 0) {
      const double infect = (a == 0 ? beta1 : beta2) * mu[1];
      return {1.0 - infect, infect};
    }
    return {delta, 1.0 - delta};
  };
  env.reward = [c1, c2, c3](int s, const Measure&, int a) {
    return -c1 * (s == 1) - c2 * (a == 1) - c3 * (s == 1 && a == 0);
  };
  // c2 and c3 never co-occur, but their sum still bounds |r|.
  env.reward_bound = c1 + c2 + c3;
  env.reward_lipschitz = 0.0;
  env.transition_lipschitz = 2.0 * beta1;
  env.episode_length = episode_length;
  env.discount = discount;
  return env;
}

EnvironmentSpec malware_env(int k, double c1, double c2, double chi,
                            int episode_length, double discount) {
  if (k < 2) throw std::invalid_argument("health levels must be >= 2");
  if (!(chi >= 0.0 && chi < 1.0))
    throw std::invalid_argument("chi must lie in [0,1)");
  if (c1 < 0.0 || c2 < 0.0)
    throw std::invalid_argument("costs must be non-negative");
  if (episode_length < 1)
    throw std::invalid_argument("episode_length must be >= 1");
  if (!(discount > 0.0 && discount < 1.0))
    throw std::invalid_argument("discount must lie in (0,1)");

  EnvironmentSpec env;
  env.name = "malware";
  env.states.resize(k);
  for (int s = 0; s < k; ++s) env.states[s] = std::to_string(s);
  env.actions = {"0", "1"};
  env.transition = [k, chi](int s, const Measure&,
                            int a) -> std::vector<double> {
    std::vector<double> row(k, 0.0);
    if (a == 1) {
      row[0] = 1.0;
    } else {
      const int decayed =
          s + static_cast<int>(std::floor((k - s) * chi));
      row[std::min(decayed, k - 1)] = 1.0;  // clamp guards chi near 1
    }
    return row;
  };
  env.reward = [k, c1, c2](int s, const Measure& mu, int a) {
    double mean_level = 0.0;
    for (int sp = 0; sp < static_cast<int>(mu.size()); ++sp)
      mean_level += sp * mu[sp];
    return -(c1 + mean_level) * s / k - c2 * a;
  };
  env.reward_bound = (c1 + (k - 1)) * (k - 1) / k + c2;
  env.reward_lipschitz = static_cast<double>(k - 1) * (k - 1) / k;
  env.transition_lipschitz = 0.0;
  env.episode_length = episode_length;
  env.discount = discount;
  return env;
}

namespace {

// Random sub-probability measure: a simplex point scaled by a uniform total
// mass in [0, 1].
Measure random_sub_probability(Rng& rng, int states) {
  Measure mu(states);
  double sum = 0.0;
  for (auto& v : mu) {
    v = -std::log(1.0 - rng.uniform());
    sum += v;
  }
  const double mass = rng.uniform();
  for (auto& v : mu) v *= mass / sum;
  return mu;
}

}  // namespace

ValidationReport validate(const EnvironmentSpec& env, int samples,
                          std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  ValidationReport report;
  report.samples = samples;
  report.contraction_margin_ok = env.contraction_margin_ok();
  report.min_transition_entry = 0.0;

  Rng rng(seed);
  const int ns = env.num_states();
  const int na = env.num_actions();
  constexpr double kTol = 1e-12;
  for (int it = 0; it < samples; ++it) {
    const int s = static_cast<int>(rng.uniform() * ns) % ns;
    const int a = static_cast<int>(rng.uniform() * na) % na;
    const Measure mu1 = random_sub_probability(rng, ns);
    const Measure mu2 = random_sub_probability(rng, ns);

    const std::vector<double> p1 = env.transition(s, mu1, a);
    const std::vector<double> p2 = env.transition(s, mu2, a);
    const double sum_err = std::abs(total_mass(p1) - 1.0);
    report.max_row_sum_error = std::max(report.max_row_sum_error, sum_err);
    const double min_entry = *std::min_element(p1.begin(), p1.end());
    report.min_transition_entry =
        std::min(report.min_transition_entry, min_entry);
    if (sum_err > kTol || min_entry < 0.0) ++report.normalization_violations;

    const double r1 = env.reward(s, mu1, a);
    report.max_abs_reward = std::max(report.max_abs_reward, std::abs(r1));
    if (std::abs(r1) > env.reward_bound + kTol)
      ++report.reward_bound_violations;

    const double dmu = l1_distance(mu1, mu2);
    if (dmu > 1e-9) {
      const double p_ratio = l1_distance(p1, p2) / dmu;
      report.max_transition_ratio =
          std::max(report.max_transition_ratio, p_ratio);
      if (p_ratio > env.transition_lipschitz + 1e-9)
        ++report.transition_lipschitz_violations;
      const double r_ratio = std::abs(r1 - env.reward(s, mu2, a)) / dmu;
      report.max_reward_ratio = std::max(report.max_reward_ratio, r_ratio);
      if (r_ratio > env.reward_lipschitz + 1e-9)
        ++report.reward_lipschitz_violations;
    }
  }
  return report;
}

}  // namespace gmfc
