#include "voltmarket/training.hpp"

#include <algorithm>
#include <stdexcept>

#include "voltmarket/parallel.hpp"

namespace voltmarket {

namespace {

StepRecord make_record(std::size_t t, const StepOutcome& out, const RewardConfig& reward) {
  const RewardBreakdown r = compute_reward(out.price_sold, out.purchase_price, out.e_renewable, out.e_demand, reward);
  return {t, out.price_sold, out.e_demand, out.e_renewable, out.purchase_price, r.r1, r.r2, r.total};
}

double mean(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

double EpsilonSchedule::at(std::size_t step) const {
  if (steps <= 1) return step == 0 ? start : end;
  if (step >= steps - 1) return end;
  const double u = static_cast<double>(step) / static_cast<double>(steps - 1);
  return start + (end - start) * u;
}

FeatureScaling warmup_scaling(std::span<const Scenario> scenarios, const PriceGrid& grid, std::size_t steps,
                              std::uint64_t seed) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    Rng rng(derive_seed(seed, 0xa3, i));
    GridEnv env(scenarios[i]);
    StateWindow s = env.reset();
    for (std::size_t k = 0; k < steps; ++k) {
      rows.push_back(flatten_state(s));
      const std::size_t a = rng.index(grid.size());
      const StepOutcome out = env.step({grid.levels[a], a, false});
      s = out.done ? env.reset() : out.next_state;
    }
  }
  if (rows.empty()) throw std::invalid_argument("warmup_scaling: no warm-up steps");
  return fit_scaling(rows);
}

PolicyParams random_params(std::size_t actions, const Horizon& horizon, FeatureScaling scaling, double init_scale,
                           std::uint64_t seed) {
  PolicyParams p = PolicyParams::zeros(actions, feature_count(horizon));
  p.scaling = std::move(scaling);
  Rng rng(seed);
  for (auto& w : p.weights) w = init_scale * rng.normal();
  return p;
}

EpisodeRecord run_episode(const Scenario& scenario, const PricePolicy& policy, const RewardConfig& reward) {
  GridEnv env(scenario);
  EpisodeRecord ep;
  ep.weights = reward.weights;
  ep.steps.reserve(scenario.episode_length);
  StateWindow s = env.reset();
  while (!env.done()) {
    const std::size_t t = env.t();
    const PriceSignal a = policy(s);
    StepOutcome out = env.step(a);
    ep.steps.push_back(make_record(t, out, reward));
    s = std::move(out.next_state);
  }
  return ep;
}

double episode_return(const EpisodeRecord& episode) {
  double acc = 0.0;
  for (const auto& s : episode.steps) acc += s.total;
  return acc;
}

QLearner::QLearner(const Scenario& scenario, PolicyParams params, const PriceGrid& grid, const RewardConfig& reward,
                   double lr, double gamma, EpsilonSchedule epsilon, std::uint64_t seed)
    : env_(scenario),
      params_(std::move(params)),
      grid_(grid),
      reward_(reward),
      lr_(lr),
      gamma_(gamma),
      epsilon_(epsilon),
      rng_(seed) {
  if (grid_.size() != params_.actions) throw std::invalid_argument("QLearner: grid size differs from policy actions");
}

void QLearner::run(std::size_t steps) {
  for (std::size_t k = 0; k < steps; ++k) {
    if (need_reset_) {
      features_ = featurize(env_.reset(), params_.scaling);
      running_return_ = 0.0;
      need_reset_ = false;
    }
    const std::size_t t = env_.t();
    const PriceSignal a = select_action(params_, features_, epsilon_.at(steps_), grid_, rng_);
    violations_.record(t, a.price, grid_.p_min, grid_.p_max);
    const StepOutcome out = env_.step(a);
    const RewardBreakdown r = compute_reward(out.price_sold, out.purchase_price, out.e_renewable, out.e_demand, reward_);
    Transition tr;
    tr.features = std::move(features_);
    tr.action_index = a.level_index;
    tr.reward = r.total;
    tr.next_features = featurize(out.next_state, params_.scaling);
    tr.done = out.done;
    td_update(params_, tr, lr_, gamma_);
    features_ = std::move(tr.next_features);
    running_return_ += r.total;
    ++steps_;
    if (out.done) {
      returns_.push_back(running_return_);
      need_reset_ = true;
    }
  }
}

TrainResult train_agent(const Scenario& scenario, const AgentConfig& config, const RewardConfig& reward,
                        std::uint64_t seed) {
  const PriceGrid grid = config.grid();
  FeatureScaling scaling =
      warmup_scaling(std::span<const Scenario>(&scenario, 1), grid, config.warmup_steps, derive_seed(seed, 2));
  PolicyParams init = random_params(grid.size(), scenario.horizon, std::move(scaling), config.init_scale,
                                    derive_seed(seed, 1));
  const std::size_t total_steps = config.episodes * scenario.episode_length;
  QLearner learner(scenario, std::move(init), grid, reward, config.lr, config.gamma,
                   {config.epsilon_start, config.epsilon_end, total_steps}, derive_seed(seed, 3));
  learner.run(total_steps);
  return {learner.params(), learner.episode_returns(), learner.violations()};
}

EpisodeRecord evaluate_greedy(const PolicyParams& params, const PriceGrid& grid, const Scenario& scenario,
                              const RewardConfig& reward) {
  return run_episode(
      scenario,
      [&](const StateWindow& s) {
        const auto q = q_values(params, featurize(s, params.scaling));
        const std::size_t a = greedy_index(q);
        return PriceSignal{grid.levels[a], a, false};
      },
      reward);
}

EpisodeRecord evaluate_fixed_price(Price price, const Scenario& scenario, const RewardConfig& reward) {
  return run_episode(scenario, [price](const StateWindow&) { return PriceSignal{price, 0, false}; }, reward);
}

RawPriceEvaluation evaluate_raw_prices(std::span<const Price> prices, const PriceGrid& grid,
                                       const Scenario& scenario, const RewardConfig& reward) {
  if (prices.empty()) throw std::invalid_argument("evaluate_raw_prices: empty price sequence");
  RawPriceEvaluation result;
  result.episode = run_episode(
      scenario,
      [&](const StateWindow& s) {
        const Price attempted = prices[s.t % prices.size()];
        const ClampResult c = clamp_price(attempted, grid);
        result.violations.record(s.t, attempted, grid.p_min, grid.p_max);
        return PriceSignal{c.price, 0, c.violated};
      },
      reward);
  return result;
}

std::vector<TradeoffRow> train_constraint_family(std::span<const ConstraintLevel> levels, const Scenario& scenario,
                                                 const AgentConfig& config, const RewardConfig& reward,
                                                 std::span<const std::uint64_t> seeds, std::size_t workers) {
  if (levels.size() < 2) throw std::invalid_argument("train_constraint_family: need at least two constraint levels");
  if (seeds.empty()) throw std::invalid_argument("train_constraint_family: need at least one seed");

  struct Cell {
    double ret = 0.0, r1 = 0.0, r2 = 0.0;
    std::size_t violations = 0;
  };
  std::vector<Cell> cells(levels.size() * seeds.size());
  parallel_for(cells.size(), workers, [&](std::size_t idx) {
    const std::size_t li = idx / seeds.size();
    const std::size_t si = idx % seeds.size();
    AgentConfig banded = config;
    banded.p_min = levels[li].p_min;
    banded.p_max = levels[li].p_max;
    const TrainResult trained = train_agent(scenario, banded, reward, seeds[si]);
    const EpisodeRecord ep = evaluate_greedy(trained.params, banded.grid(), scenario, reward);
    const ObjectiveReturns sums = objective_returns(ep);
    cells[idx] = {sums.sum_total, sums.sum_r1, sums.sum_r2, trained.violations.entries.size()};
  });

  std::vector<TradeoffRow> rows;
  rows.reserve(levels.size());
  for (std::size_t li = 0; li < levels.size(); ++li) {
    TradeoffRow row;
    row.level = levels[li];
    std::vector<double> r1s, r2s;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const Cell& c = cells[li * seeds.size() + si];
      row.seed_returns.push_back(c.ret);
      r1s.push_back(c.r1);
      r2s.push_back(c.r2);
      row.violations += c.violations;
    }
    row.mean_return = mean(row.seed_returns);
    row.mean_sum_r1 = mean(r1s);
    row.mean_sum_r2 = mean(r2s);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace voltmarket
