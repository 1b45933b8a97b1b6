#pragma once

#include <span>
#include <vector>

#include "gmfc/env.hpp"

namespace gmfc {

/// Per-block probability vectors over the state set: the state of the
/// block-discretized mean-field MDP.
class DistributionEnsemble {
 public:
  DistributionEnsemble() = default;
  DistributionEnsemble(int blocks, int states)
      : blocks_(blocks),
        states_(states),
        data_(static_cast<std::size_t>(blocks) * states, 0.0) {}

  static DistributionEnsemble uniform(int blocks, int states);
  /// Every block holds a copy of mu (which must be a probability vector).
  static DistributionEnsemble replicate(const Measure& mu, int blocks);
  static DistributionEnsemble point_mass(int blocks, int states, int state);

  int blocks() const { return blocks_; }
  int states() const { return states_; }

  double& at(int m, int s) {
    return data_[static_cast<std::size_t>(m) * states_ + s];
  }
  double at(int m, int s) const {
    return data_[static_cast<std::size_t>(m) * states_ + s];
  }
  std::span<double> block(int m) {
    return {data_.data() + static_cast<std::size_t>(m) * states_,
            static_cast<std::size_t>(states_)};
  }
  std::span<const double> block(int m) const {
    return {data_.data() + static_cast<std::size_t>(m) * states_,
            static_cast<std::size_t>(states_)};
  }

  /// Throws std::runtime_error unless every block sums to 1 within tol with
  /// non-negative entries.
  void validate(double tol = 1e-12) const;

  bool operator==(const DistributionEnsemble&) const = default;

 private:
  int blocks_ = 0, states_ = 0;
  std::vector<double> data_;
};

/// Per-block, per-state probability vectors over the action set: the action
/// of the block-discretized mean-field MDP.
class PolicyEnsemble {
 public:
  PolicyEnsemble() = default;
  PolicyEnsemble(int blocks, int states, int actions)
      : blocks_(blocks),
        states_(states),
        actions_(actions),
        data_(static_cast<std::size_t>(blocks) * states * actions, 0.0) {}

  static PolicyEnsemble uniform(int blocks, int states, int actions);
  /// Pure policy: action_for[m * states + s] with probability 1.
  static PolicyEnsemble deterministic(int blocks, int states, int actions,
                                      std::span<const int> action_for);
  /// Pure policy playing the same action in every block and state.
  static PolicyEnsemble constant_action(int blocks, int states, int actions,
                                        int action);

  int blocks() const { return blocks_; }
  int states() const { return states_; }
  int actions() const { return actions_; }

  double& at(int m, int s, int a) {
    return data_[(static_cast<std::size_t>(m) * states_ + s) * actions_ + a];
  }
  double at(int m, int s, int a) const {
    return data_[(static_cast<std::size_t>(m) * states_ + s) * actions_ + a];
  }
  std::span<double> row(int m, int s) {
    return {data_.data() + (static_cast<std::size_t>(m) * states_ + s) * actions_,
            static_cast<std::size_t>(actions_)};
  }
  std::span<const double> row(int m, int s) const {
    return {data_.data() + (static_cast<std::size_t>(m) * states_ + s) * actions_,
            static_cast<std::size_t>(actions_)};
  }

  void validate(double tol = 1e-12) const;

  bool operator==(const PolicyEnsemble&) const = default;

 private:
  int blocks_ = 0, states_ = 0, actions_ = 0;
  std::vector<double> data_;
};

/// Sum over blocks of per-block L1 distances.
double l1_distance(const DistributionEnsemble& a, const DistributionEnsemble& b);
/// Sum over (block, state) rows of L1 distances.
double l1_distance(const PolicyEnsemble& a, const PolicyEnsemble& b);

}  // namespace gmfc
