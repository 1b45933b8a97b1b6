#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gmfc {

/// Non-negative masses over the ordered state set. Used both for probability
/// vectors (mass 1) and graphon-weighted neighborhood measures (mass <= 1).
using Measure = std::vector<double>;

double total_mass(const Measure& mu);
double l1_distance(const Measure& a, const Measure& b);

/// Finite state/action model whose transition kernel and reward take the
/// neighborhood measure as an extra argument. Declared bound constants let
/// downstream checks compare empirical behavior with the model's contract.
/// Immutable after construction; transition/reward are pure.
struct EnvironmentSpec {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> actions;

  /// P(. | s, mu, a): a probability vector over states for every state s,
  /// action a, and sub-probability measure mu.
  std::function<std::vector<double>(int, const Measure&, int)> transition;
  /// r(s, mu, a), bounded by reward_bound in absolute value.
  std::function<double(int, const Measure&, int)> reward;

  double reward_bound = 0.0;          // M_r
  double reward_lipschitz = 0.0;      // L_r, w.r.t. the L1 norm on mu
  double transition_lipschitz = 0.0;  // L_P
  int episode_length = 1;
  double discount = 0.95;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }

  /// discount * (L_P + 1) < 1: the condition under which discounted value
  /// iteration arguments close. Surfaced as a warning, not an error.
  bool contraction_margin_ok() const {
    return discount * (transition_lipschitz + 1.0) < 1.0;
  }
};

/// Susceptible/Infected dynamics with a contact decision.
/// States {S, I}, actions {C, NC}.
///   P(I | S, C, mu)  = beta1 * mu(I)        P(I | S, NC, mu) = beta2 * mu(I)
///   P(S | I, ., mu)  = delta (action enters only through the reward)
///   r(s, mu, a) = -c1 1{s=I} - c2 1{a=NC} - c3 1{s=I} 1{a=C}
EnvironmentSpec sis_env(double beta1 = 0.8, double beta2 = 0.0,
                        double delta = 0.3, double c1 = 2.0, double c2 = 0.3,
                        double c3 = 0.5, int episode_length = 50,
                        double discount = 0.95);

/// Health-level dynamics with a repair decision. States {0..k-1} (0 best),
/// actions {0 = idle, 1 = repair}.
///   a=1 -> 0;  a=0 -> min(k-1, s + floor((k-s) * chi))
///   r(s, mu, a) = -(c1 + <mu>) s / k - c2 a, with <mu> = sum_s s mu(s).
EnvironmentSpec malware_env(int k = 3, double c1 = 0.3, double c2 = 0.5,
                            double chi = 0.7, int episode_length = 10,
                            double discount = 0.95);

/// Worst observed deviations from the declared environment contract over
/// random (s, mu1, mu2, a) samples. Violations are reported, never thrown.
struct ValidationReport {
  int samples = 0;
  double max_row_sum_error = 0.0;      // max |sum P - 1|
  double min_transition_entry = 0.0;   // most negative entry seen
  double max_abs_reward = 0.0;
  double max_transition_ratio = 0.0;   // empirical L_P
  double max_reward_ratio = 0.0;       // empirical L_r
  int normalization_violations = 0;
  int reward_bound_violations = 0;
  int transition_lipschitz_violations = 0;
  int reward_lipschitz_violations = 0;
  bool contraction_margin_ok = true;

  bool ok() const {
    return normalization_violations == 0 && reward_bound_violations == 0 &&
           transition_lipschitz_violations == 0 &&
           reward_lipschitz_violations == 0;
  }
};

ValidationReport validate(const EnvironmentSpec& env, int samples,
                          std::uint64_t seed);

}  // namespace gmfc
