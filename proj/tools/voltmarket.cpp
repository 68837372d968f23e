#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "voltmarket/harness/experiment.hpp"

using voltmarket::harness::RunOptions;
using voltmarket::harness::Subcommand;

int main(int argc, char** argv) {
  CLI::App app{"Retail electricity pricing simulator"};
  app.require_subcommand(1, 1);

  struct Bound {
    Subcommand sub;
    CLI::App* cmd;
  };
  const std::pair<Subcommand, const char*> commands[] = {
      {Subcommand::validate, "Check the configuration and input files"},
      {Subcommand::build_pool, "Synthesize the training and held-out scenario pools"},
      {Subcommand::train, "Train the pricing agent on one scenario"},
      {Subcommand::meta_train, "Meta-train an initialization across the pool"},
      {Subcommand::evaluate, "Compare adaptation from the meta-initialization against a fresh one"},
      {Subcommand::tradeoff, "Train one policy per price band and tabulate returns"},
      {Subcommand::report, "Merge earlier outputs into a single report"},
  };

  RunOptions options;
  std::string config, out_dir;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::vector<Bound> bound;
  for (const auto& [sub, help] : commands) {
    CLI::App* cmd = app.add_subcommand(std::string(voltmarket::harness::to_string(sub)), help);
    cmd->add_option("--config", config, "Experiment configuration (JSON)")->required();
    cmd->add_option("--out", out_dir, "Output directory, overriding the configuration");
    cmd->add_option("--seed", seed, "Base seed, overriding the configuration");
    cmd->add_option("--threads", threads, "Worker threads (default: VOLTMARKET_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    bound.push_back({sub, cmd});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : voltmarket::harness::kExitInvalid;
  }

  for (const auto& b : bound) {
    if (!b.cmd->parsed()) continue;
    options.config_path = config;
    if (b.cmd->count("--out")) options.out_dir = out_dir;
    if (b.cmd->count("--seed")) options.seed = seed;
    if (b.cmd->count("--threads")) options.workers = threads;
    return voltmarket::harness::run_experiment(b.sub, options, std::cout, std::cerr);
  }
  return voltmarket::harness::kExitInvalid;
}
