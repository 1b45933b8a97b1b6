#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmfc/env.hpp"
#include "gmfc/graphon.hpp"
#include "gmfc/nagent.hpp"
#include "gmfc/optimizer.hpp"

namespace gmfc {

/// Configuration failure carrying the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error("config error at " + path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ExperimentKind { Optimize, Simulate, Converge, GraphonDist, ValidateEnv };

enum class PolicySource { Uniform, Optimize, File };

/// Fully resolved run description. `resolved()` rebuilds the canonical JSON
/// (defaults materialized) that artifacts embed in their headers.
struct RunConfig {
  EnvironmentSpec env;
  nlohmann::json env_doc;  // normalized env parameters, set by parse_config
  Graphon graphon = Graphon::erdos_renyi(0.0);
  int blocks = 1;
  OptimizerConfig optimizer;
  ExperimentKind kind = ExperimentKind::Simulate;
  std::vector<int> n_list;
  int runs = 1000;
  int horizon = 0;  // 0 = environment episode length
  EdgeMode coupling = EdgeMode::C2;
  RewardMode reward_mode = RewardMode::Episode;
  PolicySource policy_source = PolicySource::Uniform;
  std::string policy_file;
  bool resample_graph = true;
  bool trace_first_episode = false;  // simulate: dump run 0's step trace
  Measure mu0;  // empty = uniform over states
  std::vector<int> k_list = {4, 8, 16, 32};
  int dist_resolution = 128;
  int validate_samples = 10000;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int threads = 1;

  int horizon_or_default() const {
    return horizon > 0 ? horizon : env.episode_length;
  }
  Measure mu0_or_uniform() const {
    if (!mu0.empty()) return mu0;
    return Measure(env.num_states(), 1.0 / env.num_states());
  }

  nlohmann::json resolved() const;
};

/// Parses and validates a config document. Throws ConfigError naming the
/// field path on any malformed or out-of-range value.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

}  // namespace gmfc
