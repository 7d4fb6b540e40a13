// explore: run diversity-aware exploration experiments from a config file.

#include <CLI11.hpp>

#include <iostream>

#include "explore/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulated knowledge-exploration experiments for recommender strategies"};
  app.require_subcommand(1);

  std::string config;
  explore::RunOverrides overrides;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 0;

  auto* run = app.add_subcommand("run", "Run every configured experiment and write the reports");
  run->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Override the top-level seed");
  auto* out_opt = run->add_option("--out", out_dir, "Override the output directory");
  auto* workers_opt =
      run->add_option("--workers", workers, "Worker threads (0 = available parallelism)")
          ->check(CLI::NonNegativeNumber);

  double gamma = 2.0;
  std::vector<double> targets{5.0, 10.0, 20.0};
  auto* cal = app.add_subcommand("calibrate", "Solve lambda for target expected steps");
  cal->add_option("--gamma", gamma, "Weibull shape")->capture_default_str();
  cal->add_option("--expected-steps", targets, "Target expected steps")->capture_default_str();

  std::string check_config;
  auto* check = app.add_subcommand("ingest-check", "Load the configured dataset and report counts");
  check->add_option("--config", check_config, "Run config (JSON)")->required()->check(CLI::ExistingFile);

  explore::SynthOptions synth;
  std::string synth_out;
  auto* syn = app.add_subcommand("synth", "Write a synthetic dataset in canonical form");
  syn->add_option("--kind", synth.kind, "clustered or low-rank")->capture_default_str();
  syn->add_option("--out", synth_out, "Output directory")->required();
  syn->add_option("--users", synth.users, "Number of users");
  syn->add_option("--items", synth.items, "Number of items");
  syn->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : explore::kExitConfig;
  }

  if (*run) {
    if (*seed_opt) overrides.seed = seed;
    if (*out_opt) overrides.out = out_dir;
    if (*workers_opt) overrides.workers = workers;
    return explore::cmd_run(config, overrides, std::cout, std::cerr);
  }
  if (*cal) return explore::cmd_calibrate(gamma, targets, std::cout, std::cerr);
  if (*check) return explore::cmd_ingest_check(check_config, std::cout, std::cerr);
  synth.out_dir = synth_out;
  return explore::cmd_synth(synth, std::cout, std::cerr);
}
