#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "runner.hpp"

namespace glauber::cli {

int main_entry(int argc, char** argv) {
  CLI::App app{"Glauber birth-and-death dynamics: simulation and verification", "glauber"};
  std::vector<std::string> command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  std::string out, fault;

  std::string help_commands = "subcommand, one of:";
  for (const auto& s : subcommands()) help_commands += "\n  " + s;
  app.add_option("command", command, help_commands)->required()->expected(1, 2);
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (u64), overrides the config");
  auto* rep_opt = app.add_option("--replicas", replicas, "replica count, overrides the config")
                      ->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "output directory, overrides the config");
  auto* fault_opt = app.add_option("--fault-inject", fault,
                                   "negative control: survival | intensity (factor 1.05)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  std::string sub = command[0];
  if (command.size() == 2) sub += " " + command[1];
  RunOptions opts;
  if (seed_opt->count()) opts.seed = seed;
  if (rep_opt->count()) opts.replicas = replicas;
  if (out_opt->count()) opts.out = out;
  if (fault_opt->count()) opts.fault = fault;

  try {
    const ExperimentConfig config = load_config(config_path);
    return run_experiment(config, sub, opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace glauber::cli
