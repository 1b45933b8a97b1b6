#include "gmfc/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gmfc {

namespace {

void check_simplex_rows(const std::vector<double>& data, std::size_t rows,
                        std::size_t width, double tol, const char* what) {
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      const double v = data[r * width + c];
      if (v < 0.0)
        throw std::runtime_error(std::string(what) + ": negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      throw std::runtime_error(std::string(what) + ": row sum " +
                               std::to_string(sum) + " deviates from 1");
  }
}

}  // namespace

DistributionEnsemble DistributionEnsemble::uniform(int blocks, int states) {
  DistributionEnsemble e(blocks, states);
  const double v = 1.0 / states;
  for (int m = 0; m < blocks; ++m)
    for (int s = 0; s < states; ++s) e.at(m, s) = v;
  return e;
}

DistributionEnsemble DistributionEnsemble::replicate(const Measure& mu,
                                                     int blocks) {
  DistributionEnsemble e(blocks, static_cast<int>(mu.size()));
  for (int m = 0; m < blocks; ++m)
    for (int s = 0; s < e.states(); ++s) e.at(m, s) = mu[s];
  e.validate(1e-9);
  return e;
}

DistributionEnsemble DistributionEnsemble::point_mass(int blocks, int states,
                                                      int state) {
  DistributionEnsemble e(blocks, states);
  for (int m = 0; m < blocks; ++m) e.at(m, state) = 1.0;
  return e;
}

void DistributionEnsemble::validate(double tol) const {
  check_simplex_rows(data_, blocks_, states_, tol, "distribution ensemble");
}

PolicyEnsemble PolicyEnsemble::uniform(int blocks, int states, int actions) {
  PolicyEnsemble p(blocks, states, actions);
  const double v = 1.0 / actions;
  for (auto& x : p.data_) x = v;
  return p;
}

PolicyEnsemble PolicyEnsemble::deterministic(int blocks, int states,
                                             int actions,
                                             std::span<const int> action_for) {
  if (static_cast<int>(action_for.size()) != blocks * states)
    throw std::invalid_argument("deterministic policy: wrong slot count");
  PolicyEnsemble p(blocks, states, actions);
  for (int m = 0; m < blocks; ++m)
    for (int s = 0; s < states; ++s)
      p.at(m, s, action_for[static_cast<std::size_t>(m) * states + s]) = 1.0;
  return p;
}

PolicyEnsemble PolicyEnsemble::constant_action(int blocks, int states,
                                               int actions, int action) {
  PolicyEnsemble p(blocks, states, actions);
  for (int m = 0; m < blocks; ++m)
    for (int s = 0; s < states; ++s) p.at(m, s, action) = 1.0;
  return p;
}

void PolicyEnsemble::validate(double tol) const {
  check_simplex_rows(data_, static_cast<std::size_t>(blocks_) * states_,
                     actions_, tol, "policy ensemble");
}

double l1_distance(const DistributionEnsemble& a,
                   const DistributionEnsemble& b) {
  double s = 0.0;
  for (int m = 0; m < a.blocks(); ++m)
    for (int i = 0; i < a.states(); ++i) s += std::abs(a.at(m, i) - b.at(m, i));
  return s;
}

double l1_distance(const PolicyEnsemble& a, const PolicyEnsemble& b) {
  double s = 0.0;
  for (int m = 0; m < a.blocks(); ++m)
    for (int i = 0; i < a.states(); ++i)
      for (int j = 0; j < a.actions(); ++j)
        s += std::abs(a.at(m, i, j) - b.at(m, i, j));
  return s;
}

}  // namespace gmfc
