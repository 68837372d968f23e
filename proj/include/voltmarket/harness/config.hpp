#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "voltmarket/meta_learn.hpp"
#include "voltmarket/scenario_pool.hpp"
#include "voltmarket/training.hpp"

namespace voltmarket::harness {

struct PoolSettings {
  PoolConfig pool;  // horizon filled from the top-level horizon section
  std::size_t heldout_count = 5;
  std::uint64_t base_seed = 1;
  std::uint64_t heldout_base_seed = 1001;
  /// Pool index of the scenario used by `train` and `tradeoff`.
  std::size_t train_scenario = 0;
};

struct MetaSettings {
  MetaConfig config;
  /// Adaptation steps granted to each initialization on held-out scenarios.
  std::size_t adapt_steps = 50;
};

/// Parsed experiment configuration. Relative paths are resolved against the
/// directory holding the configuration file.
struct ExperimentConfig {
  Horizon horizon{3, 60};
  RewardConfig reward;
  AgentConfig agent;
  PoolSettings pool;
  std::optional<MetaSettings> meta;
  std::vector<ConstraintLevel> tradeoff_bands;
  std::vector<Price> raw_prices;
  std::optional<std::filesystem::path> traces_path;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 7;
  std::size_t n_seeds = 10;
};

/// Reads and validates a configuration file. Every problem found is reported
/// in one ValidationError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses configuration text; `base_dir` anchors relative paths.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// Semantic checks on an already parsed configuration.
std::vector<std::string> config_violations(const ExperimentConfig& config);

}  // namespace voltmarket::harness
