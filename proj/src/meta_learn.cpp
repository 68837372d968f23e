#include "voltmarket/meta_learn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

#include "voltmarket/errors.hpp"
#include "voltmarket/parallel.hpp"

namespace voltmarket {

std::vector<std::string> MetaConfig::violations(std::size_t pool_size) const {
  std::vector<std::string> out;
  if (inner_steps == 0) out.emplace_back("meta.inner_steps must be > 0");
  if (!(inner_lr > 0.0 && std::isfinite(inner_lr))) out.emplace_back("meta.inner_lr must be > 0");
  if (!(meta_lr >= 0.0 && meta_lr <= 1.0)) out.emplace_back("meta.meta_lr must be in [0, 1]");
  if (meta_iterations == 0) out.emplace_back("meta.meta_iterations must be > 0");
  if (tasks_per_iteration == 0) out.emplace_back("meta.tasks_per_iteration must be > 0");
  if (pool_size > 0 && tasks_per_iteration > pool_size)
    out.emplace_back("meta.tasks_per_iteration exceeds the pool size");
  if (std::isnan(performance_threshold)) out.emplace_back("meta.performance_threshold must be a number");
  if (threshold_window == 0) out.emplace_back("meta.threshold_window must be > 0");
  return out;
}

std::string_view to_string(MetaStop stop) { return stop == MetaStop::iterations ? "iterations" : "threshold"; }

PolicyParams adapt(const PolicyParams& init, const Scenario& scenario, std::size_t k_steps, double inner_lr,
                   const AdaptSettings& settings, std::uint64_t seed) {
  if (k_steps == 0) throw std::invalid_argument("adapt: k_steps must be >= 1");
  QLearner learner(scenario, init, settings.grid, settings.reward, inner_lr, settings.gamma,
                   {settings.epsilon_start, settings.epsilon_end, k_steps}, seed);
  learner.run(k_steps);
  return learner.params();
}

PolicyParams initial_params(std::span<const Scenario> pool, const PriceGrid& grid, std::size_t warmup_steps,
                            double init_scale, std::uint64_t seed) {
  if (pool.empty()) throw ValidationError({"meta: pool is empty"});
  FeatureScaling scaling = warmup_scaling(pool, grid, warmup_steps, derive_seed(seed, 2));
  return random_params(grid.size(), pool.front().horizon, std::move(scaling), init_scale, derive_seed(seed, 1));
}

MetaResult meta_train(std::span<const Scenario> pool, const PolicyParams& init, const MetaConfig& config,
                      const AdaptSettings& settings, std::uint64_t seed, std::size_t workers,
                      const MetaObserver& observer) {
  if (pool.empty()) throw ValidationError({"meta: pool is empty"});
  if (auto v = config.violations(pool.size()); !v.empty()) throw ValidationError(std::move(v));

  MetaResult result;
  result.init = init;
  Rng task_rng(derive_seed(seed, 0x7a5c));
  std::deque<double> window;
  double window_sum = 0.0;

  for (std::size_t it = 0; it < config.meta_iterations; ++it) {
    // Sample distinct tasks by a partial Fisher-Yates shuffle.
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = 0; k < config.tasks_per_iteration; ++k) {
      std::swap(order[k], order[k + task_rng.index(pool.size() - k)]);
    }
    std::vector<std::size_t> tasks(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.tasks_per_iteration));

    std::vector<PolicyParams> adapted(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t k) {
      adapted[k] = adapt(result.init, pool[tasks[k]], config.inner_steps, config.inner_lr, settings,
                         derive_seed(seed, it + 1, k));
    });

    const PolicyParams before = result.init;
    const double inv_tasks = 1.0 / static_cast<double>(adapted.size());
    for (std::size_t j = 0; j < result.init.weights.size(); ++j) {
      double displacement = 0.0;
      for (const auto& a : adapted) displacement += a.weights[j] - before.weights[j];
      result.init.weights[j] = before.weights[j] + config.meta_lr * (displacement * inv_tasks);
    }
    if (observer) observer(it, before, adapted, result.init);

    const Scenario& probe = pool[it % pool.size()];
    const double ret = episode_return(evaluate_greedy(result.init, settings.grid, probe, settings.reward));
    window.push_back(ret);
    window_sum += ret;
    if (window.size() > config.threshold_window) {
      window_sum -= window.front();
      window.pop_front();
    }
    const double rolling = window_sum / static_cast<double>(window.size());
    result.log.push_back({it, tasks, ret, rolling});
    result.iterations = it + 1;
    if (window.size() == config.threshold_window && rolling >= config.performance_threshold) {
      result.stop = MetaStop::threshold;
      break;
    }
  }
  return result;
}

SampleEfficiencyReport evaluate_adaptation(const PolicyParams& meta_init, const PolicyParams& baseline_init,
                                           std::span<const Scenario> heldout,
                                           std::span<const Scenario> training_pool, std::size_t k_steps,
                                           std::size_t n_seeds, double inner_lr, const AdaptSettings& settings,
                                           std::uint64_t seed, std::size_t workers) {
  std::set<std::uint64_t> train_seeds;
  for (const auto& s : training_pool) train_seeds.insert(s.seed);
  std::vector<std::string> overlap;
  for (std::size_t i = 0; i < heldout.size(); ++i) {
    if (train_seeds.contains(heldout[i].seed)) {
      overlap.push_back("held-out scenario " + std::to_string(i) + " (seed " + std::to_string(heldout[i].seed) +
                        ") also appears in the training pool");
    }
  }
  if (!overlap.empty()) throw ValidationError(std::move(overlap));
  if (heldout.empty()) throw ValidationError({"evaluate_adaptation: no held-out scenarios"});
  if (k_steps == 0 || n_seeds == 0) throw ValidationError({"evaluate_adaptation: k_steps and n_seeds must be > 0"});

  SampleEfficiencyReport report;
  report.k_steps = k_steps;
  report.n_seeds = n_seeds;
  for (std::size_t q = 0; q <= 4; ++q) {
    const std::size_t c = k_steps * q / 4;
    if (report.checkpoints.empty() || report.checkpoints.back() != c) report.checkpoints.push_back(c);
  }

  auto curve = [&](const PolicyParams& init, const Scenario& sc, std::uint64_t stream) {
    QLearner learner(sc, init, settings.grid, settings.reward, inner_lr, settings.gamma,
                     {settings.epsilon_start, settings.epsilon_end, k_steps}, stream);
    std::vector<double> out;
    for (std::size_t c : report.checkpoints) {
      learner.run(c - learner.steps_taken());
      out.push_back(episode_return(evaluate_greedy(learner.params(), settings.grid, sc, settings.reward)));
    }
    return out;
  };

  report.entries.resize(heldout.size() * n_seeds);
  parallel_for(report.entries.size(), workers, [&](std::size_t idx) {
    const std::size_t si = idx / n_seeds;
    const std::size_t k = idx % n_seeds;
    AdaptationEntry& e = report.entries[idx];
    e.scenario = si;
    e.scenario_seed = heldout[si].seed;
    e.seed_index = k;
    e.seed = derive_seed(seed, si, k);
    e.meta_curve = curve(meta_init, heldout[si], e.seed);
    e.baseline_curve = curve(baseline_init, heldout[si], e.seed);
    e.meta_return = e.meta_curve.back();
    e.baseline_return = e.baseline_curve.back();
  });

  double pooled_meta = 0.0, pooled_base = 0.0;
  for (std::size_t si = 0; si < heldout.size(); ++si) {
    ScenarioEfficiency s;
    s.scenario = si;
    s.scenario_seed = heldout[si].seed;
    s.meta_curve.assign(report.checkpoints.size(), 0.0);
    s.baseline_curve.assign(report.checkpoints.size(), 0.0);
    for (std::size_t k = 0; k < n_seeds; ++k) {
      const AdaptationEntry& e = report.entries[si * n_seeds + k];
      s.meta_mean += e.meta_return;
      s.baseline_mean += e.baseline_return;
      for (std::size_t c = 0; c < report.checkpoints.size(); ++c) {
        s.meta_curve[c] += e.meta_curve[c];
        s.baseline_curve[c] += e.baseline_curve[c];
      }
      if (e.meta_return > e.baseline_return) {
        ++report.entry_meta_wins;
      } else if (e.meta_return < e.baseline_return) {
        ++report.entry_baseline_wins;
      } else {
        ++report.entry_ties;
      }
    }
    const double n = static_cast<double>(n_seeds);
    pooled_meta += s.meta_mean;
    pooled_base += s.baseline_mean;
    s.meta_mean /= n;
    s.baseline_mean /= n;
    for (auto& v : s.meta_curve) v /= n;
    for (auto& v : s.baseline_curve) v /= n;
    s.meta_wins = s.meta_mean > s.baseline_mean;
    if (s.meta_wins) ++report.scenario_meta_wins;
    report.scenarios.push_back(std::move(s));
  }
  const double total = static_cast<double>(report.entries.size());
  report.pooled_meta_mean = pooled_meta / total;
  report.pooled_baseline_mean = pooled_base / total;
  return report;
}

}  // namespace voltmarket
