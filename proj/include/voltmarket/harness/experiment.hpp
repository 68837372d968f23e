#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "voltmarket/harness/config.hpp"

namespace voltmarket::harness {

enum class Subcommand { validate, build_pool, train, meta_train, evaluate, tradeoff, report };

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand sub);

struct RunOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  /// Overrides VOLTMARKET_THREADS when set.
  std::optional<std::size_t> workers;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalid = 2;

/// Runs one subcommand end to end. Returns 0 on success, 2 for invalid
/// configuration or input data, 1 for any other failure. Diagnostics go to
/// `err`, progress lines to `out`.
int run_experiment(Subcommand sub, const RunOptions& options, std::ostream& out, std::ostream& err);

/// VOLTMARKET_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
std::size_t worker_count_from_env();

struct Pools {
  std::vector<Scenario> training;
  std::vector<Scenario> heldout;
};

/// Synthesizes the training and held-out pools, replacing the weather and
/// price traces with the ingested file when one is configured.
Pools build_pools(const ExperimentConfig& config);

/// Seeds used for the per-seed runs of `train` and `tradeoff`.
std::vector<std::uint64_t> run_seeds(const ExperimentConfig& config);

/// Default nested bands around the reference price, from the degenerate band
/// out to the agent's full band.
std::vector<ConstraintLevel> default_bands(const ExperimentConfig& config);

}  // namespace voltmarket::harness
