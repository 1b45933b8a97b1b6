#include "gmfc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gmfc/parallel.hpp"
#include "gmfc/rng.hpp"
#include "gmfc/simplex.hpp"

namespace gmfc {

double evaluate_policy(const EnvironmentSpec& env, const BlockKernel& kernel,
                       const DistributionEnsemble& mu0,
                       const PolicyEnsemble& pi, RewardMode mode) {
  const int horizon = mode == RewardMode::Episode ? env.episode_length
                                                  : effective_horizon(env);
  const double discount = mode == RewardMode::Episode ? 1.0 : env.discount;
  return rollout(mu0, pi, kernel, env, horizon, discount).return_value;
}

namespace {

struct SearchState {
  PolicyEnsemble best_policy;
  double best_return = -std::numeric_limits<double>::infinity();
  long evaluations = 0;
  std::vector<TracePoint> trace;

  void offer(const PolicyEnsemble& pi, double value) {
    if (value > best_return) {
      best_return = value;
      best_policy = pi;
    }
  }
  void record(int iteration) {
    trace.push_back({iteration, best_return, evaluations});
  }
};

PolicyEnsemble softmax_policy(int blocks, int states, int actions,
                              const std::vector<double>& logits) {
  PolicyEnsemble pi(blocks, states, actions);
  for (int m = 0; m < blocks; ++m)
    for (int s = 0; s < states; ++s) {
      const std::size_t base =
          (static_cast<std::size_t>(m) * states + s) * actions;
      double hi = logits[base];
      for (int a = 1; a < actions; ++a) hi = std::max(hi, logits[base + a]);
      double sum = 0.0;
      for (int a = 0; a < actions; ++a) {
        const double e = std::exp(logits[base + a] - hi);
        pi.at(m, s, a) = e;
        sum += e;
      }
      for (int a = 0; a < actions; ++a) pi.at(m, s, a) /= sum;
    }
  return pi;
}

PolicyEnsemble argmax_policy(int blocks, int states, int actions,
                             const std::vector<double>& logits) {
  std::vector<int> choice(static_cast<std::size_t>(blocks) * states, 0);
  for (int m = 0; m < blocks; ++m)
    for (int s = 0; s < states; ++s) {
      const std::size_t slot = static_cast<std::size_t>(m) * states + s;
      const std::size_t base = slot * actions;
      int best = 0;
      for (int a = 1; a < actions; ++a)
        if (logits[base + a] > logits[base + best]) best = a;
      choice[slot] = best;
    }
  return PolicyEnsemble::deterministic(blocks, states, actions, choice);
}

template <typename Eval>
void run_cross_entropy(const OptimizerConfig& cfg, int blocks, int states,
                       int actions, const Eval& eval, SearchState& st) {
  const std::size_t dim =
      static_cast<std::size_t>(blocks) * states * actions;
  const int population = std::max(2, cfg.population);
  const int elites = std::clamp(cfg.elites, 1, population);
  constexpr double kSigmaFloor = 0.02;

  int iteration = 0;
  for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
    const std::uint64_t restart_seed = derive_seed(cfg.seed, 1 + r);
    Rng init(derive_seed(restart_seed, 0));
    std::vector<double> mean(dim), sigma(dim, 1.0);
    for (auto& v : mean) v = init.normal();

    std::vector<std::vector<double>> logits(
        population, std::vector<double>(dim));
    std::vector<PolicyEnsemble> candidates(population);
    std::vector<double> values(population);
    int stale = 0;
    for (int it = 0; it < cfg.iterations && stale < 12; ++it, ++iteration) {
      const double before = st.best_return;
      parallel_for(population, cfg.threads, [&](std::int64_t p) {
        Rng rng(derive_seed(restart_seed, 1 + static_cast<std::uint64_t>(it) *
                                                  population +
                                              p));
        auto& l = logits[p];
        for (std::size_t d = 0; d < dim; ++d)
          l[d] = mean[d] + sigma[d] * rng.normal();
        candidates[p] = softmax_policy(blocks, states, actions, l);
        values[p] = eval(candidates[p]);
      });
      st.evaluations += population;
      for (int p = 0; p < population; ++p) st.offer(candidates[p], values[p]);

      // Hardened mean: pure candidates keep the history anchored to the
      // extreme points the sampler only approaches asymptotically.
      const PolicyEnsemble hard = argmax_policy(blocks, states, actions, mean);
      st.offer(hard, eval(hard));
      ++st.evaluations;

      std::vector<int> order(population);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return values[a] > values[b]; });
      for (std::size_t d = 0; d < dim; ++d) {
        double m1 = 0.0, m2 = 0.0;
        for (int e = 0; e < elites; ++e) {
          const double v = logits[order[e]][d];
          m1 += v;
          m2 += v * v;
        }
        m1 /= elites;
        mean[d] = m1;
        sigma[d] = std::max(std::sqrt(std::max(m2 / elites - m1 * m1, 0.0)),
                            kSigmaFloor);
      }
      st.record(iteration);
      stale = st.best_return > before + cfg.tolerance ? 0 : stale + 1;
    }
  }
}

template <typename Eval>
void run_finite_diff(const OptimizerConfig& cfg, int blocks, int states,
                     int actions, const Eval& eval, SearchState& st) {
  const std::size_t dim =
      static_cast<std::size_t>(blocks) * states * actions;
  auto project_rows = [&](std::vector<double>& x) {
    for (std::size_t row = 0; row < dim / actions; ++row)
      project_to_simplex(
          std::span<double>(x.data() + row * actions, actions));
  };
  auto to_policy = [&](const std::vector<double>& x) {
    PolicyEnsemble pi(blocks, states, actions);
    for (int m = 0; m < blocks; ++m)
      for (int s = 0; s < states; ++s)
        for (int a = 0; a < actions; ++a)
          pi.at(m, s, a) =
              x[(static_cast<std::size_t>(m) * states + s) * actions + a];
    return pi;
  };

  std::vector<double> x(dim, 1.0 / actions);
  std::vector<double> grad(dim);
  std::vector<std::pair<PolicyEnsemble, double>> stencil(2 * dim);
  int stale = 0;
  for (int it = 0; it < cfg.iterations && stale < 12; ++it) {
    const double before = st.best_return;
    parallel_for(static_cast<std::int64_t>(dim), cfg.threads,
                 [&](std::int64_t j) {
                   for (int side = 0; side < 2; ++side) {
                     std::vector<double> y = x;
                     y[j] += side == 0 ? cfg.fd_epsilon : -cfg.fd_epsilon;
                     project_rows(y);
                     PolicyEnsemble pi = to_policy(y);
                     stencil[2 * j + side] = {pi, eval(pi)};
                   }
                   grad[j] = (stencil[2 * j].second - stencil[2 * j + 1].second) /
                             (2.0 * cfg.fd_epsilon);
                 });
    st.evaluations += static_cast<long>(2 * dim);
    for (auto& [pi, v] : stencil) st.offer(pi, v);

    for (std::size_t j = 0; j < dim; ++j) x[j] += cfg.step_size * grad[j];
    project_rows(x);
    const PolicyEnsemble stepped = to_policy(x);
    st.offer(stepped, eval(stepped));
    ++st.evaluations;
    st.record(it);
    stale = st.best_return > before + cfg.tolerance ? 0 : stale + 1;
  }
}

template <typename Eval>
void run_exhaustive(const OptimizerConfig& cfg, int blocks, int states,
                    int actions, const Eval& eval, SearchState& st) {
  const int slots = blocks * states;
  long double count_ld = 1.0L;
  for (int i = 0; i < slots; ++i) count_ld *= actions;
  if (count_ld > 1e6L) {
    std::ostringstream msg;
    msg << "exhaustive search refused: " << actions << "^" << slots << " = ";
    if (count_ld < 1.8e19L)
      msg << static_cast<unsigned long long>(count_ld);
    else
      msg << static_cast<double>(count_ld);
    msg << " candidates exceed 1000000";
    throw std::invalid_argument(msg.str());
  }
  const long count = static_cast<long>(count_ld);

  std::vector<double> values(count);
  parallel_for(count, cfg.threads, [&](std::int64_t idx) {
    std::vector<int> choice(slots);
    long rem = idx;
    for (int slot = slots - 1; slot >= 0; --slot) {
      choice[slot] = static_cast<int>(rem % actions);
      rem /= actions;
    }
    values[idx] = eval(
        PolicyEnsemble::deterministic(blocks, states, actions, choice));
  });
  st.evaluations += count;

  // Scanning in enumeration order with strict improvement makes the lowest
  // lexicographic action tuple win ties.
  long best_idx = 0;
  for (long idx = 1; idx < count; ++idx)
    if (values[idx] > values[best_idx]) best_idx = idx;
  std::vector<int> choice(slots);
  long rem = best_idx;
  for (int slot = slots - 1; slot >= 0; --slot) {
    choice[slot] = static_cast<int>(rem % actions);
    rem /= actions;
  }
  st.offer(PolicyEnsemble::deterministic(blocks, states, actions, choice),
           values[best_idx]);
  st.record(0);
}

}  // namespace

OptimizationResult optimize(const EnvironmentSpec& env,
                            const BlockKernel& kernel,
                            const DistributionEnsemble& mu0,
                            const OptimizerConfig& cfg) {
  if (cfg.iterations < 0 || cfg.population < 1 || cfg.elites < 1 ||
      cfg.restarts < 0 || cfg.tolerance <= 0.0)
    throw std::invalid_argument("optimizer config out of range");
  if (mu0.blocks() != kernel.blocks)
    throw std::invalid_argument("ensemble/kernel block mismatch");
  if (mu0.states() != env.num_states())
    throw std::invalid_argument("ensemble/environment state mismatch");

  const int blocks = kernel.blocks;
  const int states = env.num_states();
  const int actions = env.num_actions();
  auto eval = [&](const PolicyEnsemble& pi) {
    return evaluate_policy(env, kernel, mu0, pi, cfg.mode);
  };

  SearchState st;
  const PolicyEnsemble baseline =
      PolicyEnsemble::uniform(blocks, states, actions);
  st.offer(baseline, eval(baseline));
  ++st.evaluations;

  if (cfg.iterations > 0) {
    switch (cfg.method) {
      case OptimMethod::CrossEntropy:
        run_cross_entropy(cfg, blocks, states, actions, eval, st);
        break;
      case OptimMethod::FiniteDiffAscent:
        run_finite_diff(cfg, blocks, states, actions, eval, st);
        break;
      case OptimMethod::ExhaustiveDeterministic:
        run_exhaustive(cfg, blocks, states, actions, eval, st);
        break;
    }
  }
  if (st.trace.empty()) st.record(0);

  OptimizationResult result;
  result.best_policy = st.best_policy;
  result.best_return = eval(st.best_policy);  // re-verify post hoc
  result.trace = std::move(st.trace);
  result.evaluations = st.evaluations;
  return result;
}

void write_policy(const PolicyEnsemble& pi, std::ostream& out) {
  char buf[64];
  for (int m = 0; m < pi.blocks(); ++m)
    for (int s = 0; s < pi.states(); ++s)
      for (int a = 0; a < pi.actions(); ++a) {
        std::snprintf(buf, sizeof(buf), "%.17g", pi.at(m, s, a));
        out << m + 1 << ' ' << s << ' ' << a << ' ' << buf << '\n';
      }
}

PolicyEnsemble read_policy(std::istream& in) {
  struct Row {
    int m, s, a;
    double p;
  };
  std::vector<Row> rows;
  int blocks = 0, states = 0, actions = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    int m, s, a;
    double p;
    if (!(fields >> m >> s >> a >> p) || m < 1 || s < 0 || a < 0)
      throw std::invalid_argument("policy file: malformed row '" + line + "'");
    rows.push_back({m - 1, s, a, p});
    blocks = std::max(blocks, m);
    states = std::max(states, s + 1);
    actions = std::max(actions, a + 1);
  }
  if (rows.empty()) throw std::invalid_argument("policy file: no rows");
  PolicyEnsemble pi(blocks, states, actions);
  for (const Row& r : rows) pi.at(r.m, r.s, r.a) = r.p;
  pi.validate(1e-9);
  return pi;
}

}  // namespace gmfc
