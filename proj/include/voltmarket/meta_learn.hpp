#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "voltmarket/training.hpp"

namespace voltmarket {

struct MetaConfig {
  std::size_t inner_steps = 168;
  double inner_lr = 0.01;
  double meta_lr = 0.5;
  std::size_t meta_iterations = 30;
  std::size_t tasks_per_iteration = 4;
  /// Stop once the rolling mean evaluation return reaches this value. No
  /// sensible default exists; callers must set it.
  double performance_threshold = 0.0;
  /// Number of meta-iterations averaged by the threshold test.
  std::size_t threshold_window = 8;

  std::vector<std::string> violations(std::size_t pool_size) const;
};

/// Inner-loop settings shared by adaptation during meta-training and
/// held-out evaluation.
struct AdaptSettings {
  double gamma = 0.5;
  double epsilon_start = 0.3;
  double epsilon_end = 0.02;
  PriceGrid grid;
  RewardConfig reward;
};

/// k_steps of epsilon-greedy Q-learning from `init`, epsilon annealed over
/// those steps. `init` is taken by const reference and never modified.
PolicyParams adapt(const PolicyParams& init, const Scenario& scenario, std::size_t k_steps, double inner_lr,
                   const AdaptSettings& settings, std::uint64_t seed);

enum class MetaStop { iterations, threshold };
std::string_view to_string(MetaStop stop);

struct MetaIterationLog {
  std::size_t iteration = 0;
  std::vector<std::size_t> tasks;
  double eval_return = 0.0;
  double rolling_mean = 0.0;
};

struct MetaResult {
  PolicyParams init;
  MetaStop stop = MetaStop::iterations;
  std::size_t iterations = 0;
  std::vector<MetaIterationLog> log;
};

/// Called after every meta-update with the parameters before the update, the
/// per-task adapted parameters and the parameters after the update.
using MetaObserver = std::function<void(std::size_t iteration, const PolicyParams& before,
                                        std::span<const PolicyParams> adapted, const PolicyParams& after)>;

/// First-order meta-training: each iteration adapts a sample of tasks from
/// the current initialization and moves it by meta_lr times the mean
/// parameter displacement. After each update the initialization is
/// evaluated greedily on one pool scenario (round robin); the run stops when
/// the rolling mean of those returns reaches the threshold.
MetaResult meta_train(std::span<const Scenario> pool, const PolicyParams& init, const MetaConfig& config,
                      const AdaptSettings& settings, std::uint64_t seed, std::size_t workers = 1,
                      const MetaObserver& observer = {});

/// Initialization used for meta-training and as the random baseline:
/// scaling from warm-up rollouts over the whole pool, Gaussian weights.
PolicyParams initial_params(std::span<const Scenario> pool, const PriceGrid& grid, std::size_t warmup_steps,
                            double init_scale, std::uint64_t seed);

struct AdaptationEntry {
  std::size_t scenario = 0;
  std::uint64_t scenario_seed = 0;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  double meta_return = 0.0;
  double baseline_return = 0.0;
  /// Greedy evaluation return at each checkpoint.
  std::vector<double> meta_curve;
  std::vector<double> baseline_curve;
};

struct ScenarioEfficiency {
  std::size_t scenario = 0;
  std::uint64_t scenario_seed = 0;
  double meta_mean = 0.0;
  double baseline_mean = 0.0;
  bool meta_wins = false;
  std::vector<double> meta_curve;
  std::vector<double> baseline_curve;
};

struct SampleEfficiencyReport {
  std::size_t k_steps = 0;
  std::size_t n_seeds = 0;
  std::vector<std::size_t> checkpoints;
  std::vector<AdaptationEntry> entries;
  std::vector<ScenarioEfficiency> scenarios;
  double pooled_meta_mean = 0.0;
  double pooled_baseline_mean = 0.0;
  std::size_t entry_meta_wins = 0;
  std::size_t entry_baseline_wins = 0;
  std::size_t entry_ties = 0;
  std::size_t scenario_meta_wins = 0;
};

/// Adapts both initializations on every held-out scenario and seed (paired
/// streams) and compares greedy evaluation returns. Throws ValidationError
/// when a held-out scenario seed also appears in the training pool.
SampleEfficiencyReport evaluate_adaptation(const PolicyParams& meta_init, const PolicyParams& baseline_init,
                                           std::span<const Scenario> heldout,
                                           std::span<const Scenario> training_pool, std::size_t k_steps,
                                           std::size_t n_seeds, double inner_lr, const AdaptSettings& settings,
                                           std::uint64_t seed, std::size_t workers = 1);

}  // namespace voltmarket
