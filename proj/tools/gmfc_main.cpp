#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gmfc/config.hpp"
#include "gmfc/parallel.hpp"
#include "gmfc/rng.hpp"
#include "gmfc/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gmfc: graphon mean-field control experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string seed_override;
  int threads = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "execute a run config");
  run_cmd->add_option("config", config_path, "path to the JSON run config")
      ->required();
  run_cmd->add_option("--out", out_override, "override the output directory");
  run_cmd->add_option("--seed", seed_override, "override the master seed");
  run_cmd->add_option("--threads", threads,
                      "worker threads (0 = hardware concurrency)");

  CLI11_PARSE(app, argc, argv);

  try {
    gmfc::RunConfig cfg = gmfc::load_config(config_path);
    // Seed precedence: --seed flag, then GMFC_SEED, then the config file.
    if (const char* env_seed = std::getenv("GMFC_SEED"))
      cfg.seed = std::stoull(env_seed);
    if (!seed_override.empty()) cfg.seed = std::stoull(seed_override);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads > 0)
      cfg.threads = threads;
    else if (threads == 0 && cfg.threads <= 1)
      cfg.threads = gmfc::default_thread_count();
    cfg.optimizer.threads = cfg.threads;
    cfg.optimizer.seed = gmfc::derive_seed(cfg.seed, 0);

    return gmfc::run(cfg, std::cerr);
  } catch (const gmfc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
