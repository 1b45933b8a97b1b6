#include "gmfc/config.hpp"

#include <cmath>
#include <fstream>

#include "gmfc/rng.hpp"

namespace gmfc {

using nlohmann::json;

namespace {

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError(path + "." + key, "missing required field");
  return *it;
}

double number_or(const json& obj, const std::string& path, const char* key,
                 double fallback) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number())
    throw ConfigError(path + "." + key, "expected a number");
  return it->get<double>();
}

long integer_or(const json& obj, const std::string& path, const char* key,
                long fallback) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer())
    throw ConfigError(path + "." + key, "expected an integer");
  return it->get<long>();
}

bool flag_or(const json& obj, const std::string& path, const char* key,
             bool fallback) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean())
    throw ConfigError(path + "." + key, "expected a boolean");
  return it->get<bool>();
}

std::string string_or(const json& obj, const std::string& path,
                      const char* key, const std::string& fallback) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string())
    throw ConfigError(path + "." + key, "expected a string");
  return it->get<std::string>();
}

EnvironmentSpec parse_env(const json& doc, json& echo) {
  const std::string kind = member(doc, "env", "kind").get<std::string>();
  try {
    if (kind == "sis") {
      const double beta1 = number_or(doc, "env", "beta1", 0.8);
      const double beta2 = number_or(doc, "env", "beta2", 0.0);
      const double delta = number_or(doc, "env", "delta", 0.3);
      const double c1 = number_or(doc, "env", "c1", 2.0);
      const double c2 = number_or(doc, "env", "c2", 0.3);
      const double c3 = number_or(doc, "env", "c3", 0.5);
      const int episode =
          static_cast<int>(integer_or(doc, "env", "episode_length", 50));
      const double discount = number_or(doc, "env", "discount", 0.95);
      echo = {{"kind", "sis"},       {"beta1", beta1},
              {"beta2", beta2},      {"delta", delta},
              {"c1", c1},            {"c2", c2},
              {"c3", c3},            {"episode_length", episode},
              {"discount", discount}};
      return sis_env(beta1, beta2, delta, c1, c2, c3, episode, discount);
    }
    if (kind == "malware") {
      const int k = static_cast<int>(integer_or(doc, "env", "k", 3));
      const double c1 = number_or(doc, "env", "c1", 0.3);
      const double c2 = number_or(doc, "env", "c2", 0.5);
      const double chi = number_or(doc, "env", "chi", 0.7);
      const int episode =
          static_cast<int>(integer_or(doc, "env", "episode_length", 10));
      const double discount = number_or(doc, "env", "discount", 0.95);
      echo = {{"kind", "malware"},   {"k", k},
              {"c1", c1},            {"c2", c2},
              {"chi", chi},          {"episode_length", episode},
              {"discount", discount}};
      return malware_env(k, c1, c2, chi, episode, discount);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("env", e.what());
  }
  throw ConfigError("env.kind", "unknown environment kind '" + kind + "'");
}

Graphon parse_graphon(const json& doc, json& echo) {
  const std::string kind = member(doc, "graphon", "kind").get<std::string>();
  try {
    if (kind == "erdos_renyi") {
      const double p = number_or(doc, "graphon", "p", 0.8);
      echo = {{"kind", "erdos_renyi"}, {"p", p}};
      return Graphon::erdos_renyi(p);
    }
    if (kind == "stochastic_block") {
      const double p = number_or(doc, "graphon", "p_intra", 0.9);
      const double q = number_or(doc, "graphon", "q_inter", 0.4);
      const double b = number_or(doc, "graphon", "boundary", 0.5);
      echo = {{"kind", "stochastic_block"},
              {"p_intra", p},
              {"q_inter", q},
              {"boundary", b}};
      return Graphon::stochastic_block(p, q, b);
    }
    if (kind == "random_geometric") {
      echo = {{"kind", "random_geometric"}};
      return Graphon::random_geometric();
    }
    if (kind == "step") {
      auto it = doc.find("matrix");
      if (it == doc.end() || !it->is_array())
        throw ConfigError("graphon.matrix", "expected a matrix of rows");
      std::vector<std::vector<double>> rows;
      for (const auto& row : *it)
        rows.push_back(row.get<std::vector<double>>());
      echo = {{"kind", "step"}, {"matrix", *it}};
      return Graphon::step(std::move(rows));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("graphon", e.what());
  }
  throw ConfigError("graphon.kind", "unknown graphon kind '" + kind + "'");
}

OptimMethod parse_method(const std::string& name) {
  if (name == "cross_entropy") return OptimMethod::CrossEntropy;
  if (name == "finite_diff") return OptimMethod::FiniteDiffAscent;
  if (name == "exhaustive") return OptimMethod::ExhaustiveDeterministic;
  throw ConfigError("optimizer.method", "unknown method '" + name + "'");
}

std::string method_name(OptimMethod m) {
  switch (m) {
    case OptimMethod::CrossEntropy: return "cross_entropy";
    case OptimMethod::FiniteDiffAscent: return "finite_diff";
    case OptimMethod::ExhaustiveDeterministic: return "exhaustive";
  }
  return "cross_entropy";
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "optimize") return ExperimentKind::Optimize;
  if (name == "simulate") return ExperimentKind::Simulate;
  if (name == "converge") return ExperimentKind::Converge;
  if (name == "graphon_dist") return ExperimentKind::GraphonDist;
  if (name == "validate_env") return ExperimentKind::ValidateEnv;
  throw ConfigError("experiment.kind", "unknown experiment kind '" + name + "'");
}

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Optimize: return "optimize";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Converge: return "converge";
    case ExperimentKind::GraphonDist: return "graphon_dist";
    case ExperimentKind::ValidateEnv: return "validate_env";
  }
  return "simulate";
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
  RunConfig cfg;

  json env_echo, graphon_echo;
  cfg.env = parse_env(member(doc, "<root>", "env"), env_echo);
  cfg.env_doc = env_echo;
  cfg.graphon = parse_graphon(member(doc, "<root>", "graphon"), graphon_echo);

  cfg.blocks = static_cast<int>(integer_or(doc, "<root>", "blocks", 1));
  if (cfg.blocks < 1) throw ConfigError("blocks", "must be >= 1");
  cfg.seed =
      static_cast<std::uint64_t>(integer_or(doc, "<root>", "seed", 1));
  cfg.threads = static_cast<int>(integer_or(doc, "<root>", "threads", 1));
  if (cfg.threads < 1) throw ConfigError("threads", "must be >= 1");

  if (doc.contains("optimizer")) {
    const json& opt = doc.at("optimizer");
    cfg.optimizer.method = parse_method(
        string_or(opt, "optimizer", "method", "cross_entropy"));
    cfg.optimizer.iterations =
        static_cast<int>(integer_or(opt, "optimizer", "iterations", 60));
    cfg.optimizer.population =
        static_cast<int>(integer_or(opt, "optimizer", "population", 48));
    cfg.optimizer.elites =
        static_cast<int>(integer_or(opt, "optimizer", "elites", 12));
    cfg.optimizer.restarts =
        static_cast<int>(integer_or(opt, "optimizer", "restarts", 2));
    cfg.optimizer.step_size = number_or(opt, "optimizer", "step_size", 0.5);
    cfg.optimizer.fd_epsilon = number_or(opt, "optimizer", "fd_epsilon", 1e-3);
    cfg.optimizer.tolerance = number_or(opt, "optimizer", "tolerance", 1e-9);
    if (cfg.optimizer.iterations < 0)
      throw ConfigError("optimizer.iterations", "must be >= 0");
    if (cfg.optimizer.population < 1)
      throw ConfigError("optimizer.population", "must be >= 1");
    if (cfg.optimizer.elites < 1)
      throw ConfigError("optimizer.elites", "must be >= 1");
    if (cfg.optimizer.tolerance <= 0.0)
      throw ConfigError("optimizer.tolerance", "must be > 0");
  }

  const json& exp = member(doc, "<root>", "experiment");
  cfg.kind = parse_kind(member(exp, "experiment", "kind").get<std::string>());
  if (exp.contains("n_list")) {
    if (!exp.at("n_list").is_array())
      throw ConfigError("experiment.n_list", "expected an array");
    cfg.n_list = exp.at("n_list").get<std::vector<int>>();
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
      if (cfg.n_list[i] < 1)
        throw ConfigError("experiment.n_list", "entries must be >= 1");
      if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1])
        throw ConfigError("experiment.n_list", "must be strictly increasing");
    }
  }
  cfg.runs = static_cast<int>(integer_or(exp, "experiment", "runs", 1000));
  if (cfg.runs < 1) throw ConfigError("experiment.runs", "must be >= 1");
  cfg.horizon =
      static_cast<int>(integer_or(exp, "experiment", "horizon", 0));
  if (cfg.horizon < 0) throw ConfigError("experiment.horizon", "must be >= 0");

  const std::string coupling =
      string_or(exp, "experiment", "coupling", "C2");
  if (coupling == "C1")
    cfg.coupling = EdgeMode::C1;
  else if (coupling == "C2")
    cfg.coupling = EdgeMode::C2;
  else
    throw ConfigError("experiment.coupling", "expected 'C1' or 'C2'");

  const std::string mode =
      string_or(exp, "experiment", "reward_mode", "episode");
  if (mode == "episode")
    cfg.reward_mode = RewardMode::Episode;
  else if (mode == "discounted")
    cfg.reward_mode = RewardMode::Discounted;
  else
    throw ConfigError("experiment.reward_mode",
                      "expected 'episode' or 'discounted'");

  const std::string source =
      string_or(exp, "experiment", "policy_source", "uniform");
  if (source == "uniform")
    cfg.policy_source = PolicySource::Uniform;
  else if (source == "optimize")
    cfg.policy_source = PolicySource::Optimize;
  else if (source == "file")
    cfg.policy_source = PolicySource::File;
  else
    throw ConfigError("experiment.policy_source",
                      "expected 'uniform', 'optimize', or 'file'");
  cfg.policy_file = string_or(exp, "experiment", "policy_file", "");
  if (cfg.policy_source == PolicySource::File && cfg.policy_file.empty())
    throw ConfigError("experiment.policy_file",
                      "required when policy_source is 'file'");

  cfg.resample_graph = flag_or(exp, "experiment", "resample_graph", true);
  cfg.trace_first_episode =
      flag_or(exp, "experiment", "trace_first_episode", false);
  if (exp.contains("mu0")) {
    if (!exp.at("mu0").is_array())
      throw ConfigError("experiment.mu0", "expected an array of masses");
    cfg.mu0 = exp.at("mu0").get<std::vector<double>>();
    if (static_cast<int>(cfg.mu0.size()) != cfg.env.num_states())
      throw ConfigError("experiment.mu0", "length must match the state count");
    double sum = 0.0;
    for (double v : cfg.mu0) {
      if (v < 0.0) throw ConfigError("experiment.mu0", "entries must be >= 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("experiment.mu0", "must sum to 1");
  }
  if (exp.contains("k_list")) {
    if (!exp.at("k_list").is_array())
      throw ConfigError("experiment.k_list", "expected an array");
    cfg.k_list = exp.at("k_list").get<std::vector<int>>();
    for (int k : cfg.k_list)
      if (k < 1) throw ConfigError("experiment.k_list", "entries must be >= 1");
  }
  cfg.dist_resolution = static_cast<int>(
      integer_or(exp, "experiment", "dist_resolution", 128));
  if (cfg.dist_resolution < 2)
    throw ConfigError("experiment.dist_resolution", "must be >= 2");
  cfg.validate_samples = static_cast<int>(
      integer_or(exp, "experiment", "validate_samples", 10000));
  if (cfg.validate_samples < 1)
    throw ConfigError("experiment.validate_samples", "must be >= 1");
  cfg.output_dir = string_or(exp, "experiment", "output_dir", "out");

  if (cfg.kind == ExperimentKind::Converge && cfg.n_list.empty())
    throw ConfigError("experiment.n_list", "required for a converge run");
  if (cfg.kind == ExperimentKind::Simulate && cfg.n_list.empty())
    throw ConfigError("experiment.n_list", "required for a simulate run");

  cfg.optimizer.mode = cfg.reward_mode;
  cfg.optimizer.threads = cfg.threads;
  cfg.optimizer.seed = derive_seed(cfg.seed, 0);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

nlohmann::json RunConfig::resolved() const {
  json env_out = env_doc.is_null() ? json{{"kind", env.name}} : env_doc;
  json graphon_doc;
  switch (graphon.kind()) {
    case Graphon::Kind::ErdosRenyi:
      graphon_doc = {{"kind", "erdos_renyi"}, {"p", graphon.p()}};
      break;
    case Graphon::Kind::StochasticBlock:
      graphon_doc = {{"kind", "stochastic_block"},
                     {"p_intra", graphon.p()},
                     {"q_inter", graphon.q()},
                     {"boundary", graphon.boundary()}};
      break;
    case Graphon::Kind::RandomGeometric:
      graphon_doc = {{"kind", "random_geometric"}};
      break;
    case Graphon::Kind::Step: {
      const int k = graphon.step_blocks();
      json rows = json::array();
      for (int i = 0; i < k; ++i) {
        json row = json::array();
        for (int j = 0; j < k; ++j)
          row.push_back(graphon.step_matrix()[static_cast<std::size_t>(i) * k + j]);
        rows.push_back(row);
      }
      graphon_doc = {{"kind", "step"}, {"matrix", rows}};
      break;
    }
  }

  json exp = {{"kind", kind_name(kind)},
              {"runs", runs},
              {"horizon", horizon},
              {"coupling", coupling == EdgeMode::C1 ? "C1" : "C2"},
              {"reward_mode",
               reward_mode == RewardMode::Episode ? "episode" : "discounted"},
              {"policy_source",
               policy_source == PolicySource::Uniform    ? "uniform"
               : policy_source == PolicySource::Optimize ? "optimize"
                                                         : "file"},
              {"resample_graph", resample_graph},
              {"trace_first_episode", trace_first_episode},
              {"k_list", k_list},
              {"dist_resolution", dist_resolution},
              {"validate_samples", validate_samples},
              {"output_dir", output_dir}};
  if (!n_list.empty()) exp["n_list"] = n_list;
  if (!policy_file.empty()) exp["policy_file"] = policy_file;
  if (!mu0.empty()) exp["mu0"] = mu0;

  return json{{"env", env_out},
              {"graphon", graphon_doc},
              {"blocks", blocks},
              {"seed", seed},
              {"threads", threads},
              {"optimizer",
               {{"method", method_name(optimizer.method)},
                {"iterations", optimizer.iterations},
                {"population", optimizer.population},
                {"elites", optimizer.elites},
                {"restarts", optimizer.restarts},
                {"step_size", optimizer.step_size},
                {"fd_epsilon", optimizer.fd_epsilon},
                {"tolerance", optimizer.tolerance}}},
              {"experiment", exp}};
}

}  // namespace gmfc
