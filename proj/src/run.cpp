#include "gmfc/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "gmfc/report.hpp"
#include "gmfc/rng.hpp"

namespace gmfc {

namespace {

namespace fs = std::filesystem;

// Master seed streams. Episode seeds nest below the per-N streams, so new
// experiment kinds can claim fresh indices without disturbing old results.
constexpr std::uint64_t kStreamOptimizer = 0;
constexpr std::uint64_t kStreamValidation = 1;
constexpr std::uint64_t kStreamGraphonDist = 2;
constexpr std::uint64_t kStreamStudy = 10;

std::ofstream open_artifact(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name, std::ios::binary);  // LF line endings
  if (!out)
    throw std::runtime_error("cannot write artifact '" + (dir / name).string() +
                             "'");
  return out;
}

PolicyEnsemble resolve_policy(const RunConfig& cfg, const fs::path& out_dir,
                              const std::string& config_line,
                              std::ostream& diag) {
  switch (cfg.policy_source) {
    case PolicySource::Uniform:
      return PolicyEnsemble::uniform(cfg.blocks, cfg.env.num_states(),
                                     cfg.env.num_actions());
    case PolicySource::File: {
      std::ifstream in(cfg.policy_file);
      if (!in)
        throw std::runtime_error("cannot open policy file '" +
                                 cfg.policy_file + "'");
      PolicyEnsemble pi = read_policy(in);
      if (pi.blocks() != cfg.blocks)
        diag << "note: policy file has " << pi.blocks()
             << " blocks, config requested " << cfg.blocks << "; using "
             << pi.blocks() << "\n";
      return pi;
    }
    case PolicySource::Optimize: {
      const BlockKernel kernel = discretize(cfg.graphon, cfg.blocks);
      const DistributionEnsemble mu0 =
          DistributionEnsemble::replicate(cfg.mu0_or_uniform(), cfg.blocks);
      OptimizerConfig opt = cfg.optimizer;
      opt.seed = derive_seed(cfg.seed, kStreamOptimizer);
      const OptimizationResult result = optimize(cfg.env, kernel, mu0, opt);
      auto policy_out = open_artifact(out_dir, "policy.txt");
      write_artifact_header(policy_out, "policy", config_line, cfg.seed);
      write_policy(result.best_policy, policy_out);
      auto trace_out = open_artifact(out_dir, "optimize_trace.csv");
      write_artifact_header(trace_out, "optimize", config_line, cfg.seed);
      trace_out << "iteration,best_return,evaluations\n";
      for (const TracePoint& p : result.trace)
        trace_out << p.iteration << ',' << format_double(p.best_return) << ','
                  << p.evaluations << '\n';
      diag << "optimizer: best return " << format_double(result.best_return)
           << " after " << result.evaluations << " evaluations\n";
      return result.best_policy;
    }
  }
  throw std::logic_error("unreachable policy source");
}

void run_simulate(const RunConfig& cfg, const fs::path& out_dir,
                  const std::string& config_line, std::ostream& diag) {
  const PolicyEnsemble pi = resolve_policy(cfg, out_dir, config_line, diag);
  const Measure mu0 = cfg.mu0_or_uniform();
  const double discount =
      cfg.reward_mode == RewardMode::Episode ? 1.0 : cfg.env.discount;

  auto summary_out = open_artifact(out_dir, "simulate.csv");
  write_artifact_header(summary_out, "simulate", config_line, cfg.seed);
  summary_out << "n,runs,mean,std\n";
  auto runs_out = open_artifact(out_dir, "simulate_runs.csv");
  write_artifact_header(runs_out, "simulate-runs", config_line, cfg.seed);
  runs_out << "n,run,episode_total\n";

  const std::uint64_t study_seed = derive_seed(cfg.seed, kStreamStudy);
  for (std::size_t k = 0; k < cfg.n_list.size(); ++k) {
    EpisodeParams params;
    params.n = cfg.n_list[k];
    params.mode = cfg.coupling;
    params.horizon = cfg.horizon_or_default();
    params.discount = discount;
    params.threads = cfg.threads;
    const std::uint64_t n_seed = derive_seed(study_seed, k);
    if (!cfg.resample_graph && cfg.coupling == EdgeMode::C2)
      params.fixed_edges =
          sample_edge_bits(cfg.graphon, params.n, derive_seed(n_seed, 1));
    const MonteCarloSummary mc =
        monte_carlo(cfg.env, cfg.graphon, pi, mu0, params, cfg.runs, n_seed);
    summary_out << params.n << ',' << mc.runs << ','
                << format_double(mc.mean) << ',' << format_double(mc.stddev)
                << '\n';
    for (int r = 0; r < mc.runs; ++r)
      runs_out << params.n << ',' << r << ','
               << format_double(mc.totals[r]) << '\n';
    if (cfg.trace_first_episode) {
      const EpisodeResult first = run_episode(cfg.env, cfg.graphon, pi, mu0,
                                              params, derive_seed(n_seed, 0));
      auto trace = open_artifact(
          out_dir, "episode_trace_n" + std::to_string(params.n) + ".csv");
      write_artifact_header(trace, "episode-trace", config_line, cfg.seed);
      write_episode_trace_csv(first, cfg.env.states, trace);
    }
  }
}

void run_converge(const RunConfig& cfg, const fs::path& out_dir,
                  const std::string& config_line, std::ostream& diag) {
  const PolicyEnsemble pi = resolve_policy(cfg, out_dir, config_line, diag);
  StudyParams params;
  params.n_list = cfg.n_list;
  params.mode = cfg.coupling;
  params.runs = cfg.runs;
  params.horizon = cfg.horizon_or_default();
  params.discount =
      cfg.reward_mode == RewardMode::Episode ? 1.0 : cfg.env.discount;
  params.threads = cfg.threads;
  params.resample_graph = cfg.resample_graph;
  const ConvergenceTable table =
      convergence_study(cfg.env, cfg.graphon, pi, cfg.mu0_or_uniform(), params,
                        derive_seed(cfg.seed, kStreamStudy));

  auto csv = open_artifact(out_dir, "converge.csv");
  write_artifact_header(csv, "converge", config_line, cfg.seed);
  csv << "n,runs,mc_mean,mc_std,gmfc_return,gap\n";
  for (const ConvergenceRow& row : table.rows)
    csv << row.n << ',' << row.runs << ',' << format_double(row.mc_mean) << ','
        << format_double(row.mc_std) << ',' << format_double(row.gmfc_return)
        << ',' << format_double(row.gap) << '\n';
  csv << "slope," << format_double(table.slope) << ",,,,\n";

  SvgSeries series;
  for (const ConvergenceRow& row : table.rows) {
    series.x.push_back(row.n);
    series.y.push_back(std::max(row.gap, 1e-12));
    series.y_err.push_back(row.mc_std / std::sqrt(row.runs));
  }
  auto svg = open_artifact(out_dir, "converge.svg");
  write_loglog_svg(svg, series, table.slope, "agents N", "|mean - limit|",
                   "config: " + config_line +
                       " seed: " + std::to_string(cfg.seed));
  diag << "converge: fitted slope " << format_double(table.slope) << "\n";
}

void run_graphon_dist(const RunConfig& cfg, const fs::path& out_dir,
                      const std::string& config_line, std::ostream& diag) {
  auto csv = open_artifact(out_dir, "graphon_dist.csv");
  write_artifact_header(csv, "graphon-dist", config_line, cfg.seed);
  csv << "k,distance\n";
  const std::uint64_t seed = derive_seed(cfg.seed, kStreamGraphonDist);
  for (int k : cfg.k_list) {
    const double d = operator_norm_distance(step_of(cfg.graphon, k),
                                            cfg.graphon, cfg.dist_resolution,
                                            seed);
    csv << k << ',' << format_double(d) << '\n';
    diag << "graphon_dist: K=" << k << " distance=" << format_double(d)
         << "\n";
  }
}

int run_validate_env(const RunConfig& cfg, const fs::path& out_dir,
                     const std::string& config_line, std::ostream& diag) {
  const ValidationReport report =
      validate(cfg.env, cfg.validate_samples,
               derive_seed(cfg.seed, kStreamValidation));
  auto csv = open_artifact(out_dir, "validate_env.csv");
  write_artifact_header(csv, "validate-env", config_line, cfg.seed);
  csv << "check,value,bound,ok\n";
  csv << "row_sum_error," << format_double(report.max_row_sum_error)
      << ",1e-12," << (report.normalization_violations == 0) << '\n';
  csv << "min_transition_entry," << format_double(report.min_transition_entry)
      << ",0," << (report.min_transition_entry >= 0.0) << '\n';
  csv << "max_abs_reward," << format_double(report.max_abs_reward) << ','
      << format_double(cfg.env.reward_bound) << ','
      << (report.reward_bound_violations == 0) << '\n';
  csv << "transition_lipschitz," << format_double(report.max_transition_ratio)
      << ',' << format_double(cfg.env.transition_lipschitz) << ','
      << (report.transition_lipschitz_violations == 0) << '\n';
  csv << "reward_lipschitz," << format_double(report.max_reward_ratio) << ','
      << format_double(cfg.env.reward_lipschitz) << ','
      << (report.reward_lipschitz_violations == 0) << '\n';
  csv << "contraction_margin,"
      << format_double(cfg.env.discount * (cfg.env.transition_lipschitz + 1.0))
      << ",1," << report.contraction_margin_ok << '\n';
  if (!report.ok()) {
    diag << "validate_env: contract violations found (see "
         << (out_dir / "validate_env.csv").string() << ")\n";
    return 1;
  }
  diag << "validate_env: all checks passed over " << report.samples
       << " samples\n";
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& diag) {
  try {
    const fs::path out_dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
      diag << "error: cannot create output directory '" << cfg.output_dir
           << "': " << ec.message() << "\n";
      return 1;
    }
    const std::string config_line = cfg.resolved().dump();

    if (!cfg.env.contraction_margin_ok())
      diag << "warning: discount * (L_P + 1) = "
           << format_double(cfg.env.discount *
                            (cfg.env.transition_lipschitz + 1.0))
           << " >= 1; discounted fixed-point guarantees do not apply\n";

    switch (cfg.kind) {
      case ExperimentKind::Optimize: {
        RunConfig forced = cfg;
        forced.policy_source = PolicySource::Optimize;
        resolve_policy(forced, out_dir, config_line, diag);
        return 0;
      }
      case ExperimentKind::Simulate:
        run_simulate(cfg, out_dir, config_line, diag);
        return 0;
      case ExperimentKind::Converge:
        run_converge(cfg, out_dir, config_line, diag);
        return 0;
      case ExperimentKind::GraphonDist:
        run_graphon_dist(cfg, out_dir, config_line, diag);
        return 0;
      case ExperimentKind::ValidateEnv:
        return run_validate_env(cfg, out_dir, config_line, diag);
    }
    return 0;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gmfc
