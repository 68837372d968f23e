#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "voltmarket/grid_env.hpp"
#include "voltmarket/pricing_agent.hpp"
#include "voltmarket/reward.hpp"
#include "voltmarket/telemetry.hpp"

namespace voltmarket {

/// Linear annealing from `start` to `end` over `steps` steps, then flat.
struct EpsilonSchedule {
  double start = 0.3;
  double end = 0.02;
  std::size_t steps = 1;

  double at(std::size_t step) const;
};

struct AgentConfig {
  std::size_t levels = 11;
  Price p_min = 0.05;
  Price p_max = 0.40;
  double lr = 0.01;
  double gamma = 0.5;
  double epsilon_start = 0.3;
  double epsilon_end = 0.02;
  std::size_t episodes = 40;
  std::size_t warmup_steps = 100;
  double init_scale = 0.01;

  PriceGrid grid() const { return PriceGrid::uniform(p_min, p_max, levels); }
};

/// Scaling fitted on `steps` random-policy steps of each scenario.
FeatureScaling warmup_scaling(std::span<const Scenario> scenarios, const PriceGrid& grid, std::size_t steps,
                              std::uint64_t seed);

/// Gaussian weights with standard deviation `init_scale`.
PolicyParams random_params(std::size_t actions, const Horizon& horizon, FeatureScaling scaling, double init_scale,
                           std::uint64_t seed);

/// Maps the current state window to a price. Called once per step.
using PricePolicy = std::function<PriceSignal(const StateWindow&)>;

/// One full episode from reset under `policy`.
EpisodeRecord run_episode(const Scenario& scenario, const PricePolicy& policy, const RewardConfig& reward);

/// Epsilon-greedy Q-learning on a live environment. Owns the environment,
/// the exploration stream and the step counter, so learning can be paused
/// and resumed (used for adaptation curves).
class QLearner {
 public:
  QLearner(const Scenario& scenario, PolicyParams params, const PriceGrid& grid, const RewardConfig& reward,
           double lr, double gamma, EpsilonSchedule epsilon, std::uint64_t seed);

  /// Runs `steps` environment steps, resetting the environment on episode end.
  void run(std::size_t steps);

  const PolicyParams& params() const { return params_; }
  const ViolationLog& violations() const { return violations_; }
  /// Completed-episode returns (sum of total reward).
  const std::vector<double>& episode_returns() const { return returns_; }
  std::size_t steps_taken() const { return steps_; }

 private:
  GridEnv env_;
  PolicyParams params_;
  PriceGrid grid_;
  RewardConfig reward_;
  double lr_;
  double gamma_;
  EpsilonSchedule epsilon_;
  Rng rng_;
  std::vector<double> features_;
  bool need_reset_ = true;
  double running_return_ = 0.0;
  std::size_t steps_ = 0;
  ViolationLog violations_;
  std::vector<double> returns_;
};

struct TrainResult {
  PolicyParams params;
  std::vector<double> episode_returns;
  ViolationLog violations;
};

/// Warm-up scaling, random initialization, then `config.episodes` episodes of
/// Q-learning with epsilon annealed over the whole run.
TrainResult train_agent(const Scenario& scenario, const AgentConfig& config, const RewardConfig& reward,
                        std::uint64_t seed);

EpisodeRecord evaluate_greedy(const PolicyParams& params, const PriceGrid& grid, const Scenario& scenario,
                              const RewardConfig& reward);

EpisodeRecord evaluate_fixed_price(Price price, const Scenario& scenario, const RewardConfig& reward);

struct RawPriceEvaluation {
  EpisodeRecord episode;
  ViolationLog violations;
};

/// Plays an externally supplied price sequence (cycled if shorter than the
/// episode), clamping each price into the band and logging violations.
RawPriceEvaluation evaluate_raw_prices(std::span<const Price> prices, const PriceGrid& grid,
                                       const Scenario& scenario, const RewardConfig& reward);

double episode_return(const EpisodeRecord& episode);

struct ConstraintLevel {
  Price p_min = 0.0;
  Price p_max = 0.0;
};

struct TradeoffRow {
  ConstraintLevel level;
  double mean_return = 0.0;
  double mean_sum_r1 = 0.0;
  double mean_sum_r2 = 0.0;
  std::vector<double> seed_returns;
  std::size_t violations = 0;
};

/// Trains one policy per constraint level under identical seeds and config,
/// differing only in the band, and evaluates each greedily.
std::vector<TradeoffRow> train_constraint_family(std::span<const ConstraintLevel> levels, const Scenario& scenario,
                                                 const AgentConfig& config, const RewardConfig& reward,
                                                 std::span<const std::uint64_t> seeds, std::size_t workers = 1);

}  // namespace voltmarket
