#include <doctest.h>

#include <cmath>

#include "voltmarket/errors.hpp"
#include "voltmarket/meta_learn.hpp"
#include "voltmarket/scenario_pool.hpp"

using namespace voltmarket;

namespace {

PoolConfig micro_pool() {
  PoolConfig cfg;
  cfg.count = 2;
  cfg.episode_length = 24;
  cfg.customer_count = {3, 4};
  return cfg;
}

AdaptSettings settings() {
  AdaptSettings s;
  s.grid = PriceGrid::uniform(0.05, 0.40, 5);
  return s;
}

MetaConfig quick_meta() {
  MetaConfig m;
  m.inner_steps = 24;
  m.meta_iterations = 3;
  m.tasks_per_iteration = 2;
  m.performance_threshold = 1e12;
  m.threshold_window = 2;
  return m;
}

double max_abs_diff(const PolicyParams& a, const PolicyParams& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.weights.size(); ++j) d = std::max(d, std::abs(a.weights[j] - b.weights[j]));
  return d;
}

}  // namespace

TEST_CASE("adaptation") {
  const auto pool = build_scenario_pool(micro_pool(), 40);
  const auto init = initial_params(pool, settings().grid, 24, 0.01, 9);
  CHECK(adapt(init, pool[0], 30, 0.0, settings(), 1) == init);
  const auto a = adapt(init, pool[0], 30, 0.01, settings(), 1);
  CHECK(a == adapt(init, pool[0], 30, 0.01, settings(), 1));
  CHECK(max_abs_diff(a, init) > 0.0);
  CHECK(max_abs_diff(adapt(init, pool[1], 30, 0.01, settings(), 1), init) > 0.0);
}

TEST_CASE("zero meta step keeps the initialization") {
  const auto pool = build_scenario_pool(micro_pool(), 40);
  const auto init = initial_params(pool, settings().grid, 24, 0.01, 9);
  auto cfg = quick_meta();
  cfg.meta_lr = 0.0;
  const auto r = meta_train(pool, init, cfg, settings(), 3);
  CHECK(r.init == init);
  CHECK(r.iterations == 3);
  CHECK(r.stop == MetaStop::iterations);
}

TEST_CASE("single task update is meta_lr times the displacement") {
  const auto pool = build_scenario_pool(micro_pool(), 40);
  const std::vector<Scenario> one{pool[0]};
  const auto init = initial_params(one, settings().grid, 24, 0.01, 9);
  auto cfg = quick_meta();
  cfg.tasks_per_iteration = 1;
  cfg.meta_lr = 0.3;
  std::size_t calls = 0;
  const auto r = meta_train(one, init, cfg, settings(), 3, 1,
                            [&](std::size_t, const PolicyParams& before, std::span<const PolicyParams> adapted,
                                const PolicyParams& after) {
                              REQUIRE(adapted.size() == 1);
                              for (std::size_t j = 0; j < before.weights.size(); ++j) {
                                const double expect =
                                    before.weights[j] + 0.3 * (adapted[0].weights[j] - before.weights[j]);
                                CHECK(std::abs(after.weights[j] - expect) < 1e-12);
                              }
                              ++calls;
                            });
  CHECK(calls == 3);
  CHECK(r.log.size() == 3);
}

TEST_CASE("meta training is deterministic across worker counts") {
  const auto pool = build_scenario_pool(micro_pool(), 40);
  const auto init = initial_params(pool, settings().grid, 24, 0.01, 9);
  const auto a = meta_train(pool, init, quick_meta(), settings(), 11, 1);
  const auto b = meta_train(pool, init, quick_meta(), settings(), 11, 2);
  CHECK(a.init == b.init);
  CHECK(a.log.back().eval_return == b.log.back().eval_return);
}

TEST_CASE("threshold stop waits for a full window") {
  const auto pool = build_scenario_pool(micro_pool(), 40);
  const auto init = initial_params(pool, settings().grid, 24, 0.01, 9);
  auto cfg = quick_meta();
  cfg.performance_threshold = -1e18;
  cfg.meta_iterations = 10;
  const auto r = meta_train(pool, init, cfg, settings(), 2);
  CHECK(r.stop == MetaStop::threshold);
  CHECK(r.iterations == cfg.threshold_window);
  CHECK(to_string(r.stop) == "threshold");
}

TEST_CASE("invalid meta configuration is reported in full") {
  MetaConfig m;
  m.inner_steps = 0;
  m.meta_lr = 2.0;
  m.tasks_per_iteration = 9;
  CHECK(m.violations(4).size() == 3);
}

TEST_CASE("adaptation report") {
  const auto pool = build_scenario_pool(micro_pool(), 40);
  const auto heldout = build_scenario_pool(micro_pool(), 900);
  const auto init = initial_params(pool, settings().grid, 24, 0.01, 9);
  const auto other = initial_params(pool, settings().grid, 24, 0.01, 10);

  SUBCASE("identical inits give identical statistics") {
    const auto r = evaluate_adaptation(init, init, heldout, pool, 8, 2, 0.01, settings(), 4);
    for (const auto& e : r.entries) {
      CHECK(e.meta_return == e.baseline_return);
      CHECK(e.meta_curve == e.baseline_curve);
    }
    CHECK(r.entry_ties == r.entries.size());
  }
  SUBCASE("one seed gives one entry per held-out scenario") {
    const auto r = evaluate_adaptation(init, other, heldout, pool, 8, 1, 0.01, settings(), 4);
    CHECK(r.entries.size() == heldout.size());
    CHECK(r.checkpoints == std::vector<std::size_t>{0, 2, 4, 6, 8});
  }
  SUBCASE("win counts match a recount of the entries") {
    const auto r = evaluate_adaptation(init, other, heldout, pool, 8, 3, 0.01, settings(), 4, 2);
    std::size_t wins = 0, losses = 0, ties = 0, scenario_wins = 0;
    for (const auto& e : r.entries) {
      if (e.meta_return > e.baseline_return) ++wins;
      else if (e.meta_return < e.baseline_return) ++losses;
      else ++ties;
    }
    for (std::size_t s = 0; s < heldout.size(); ++s) {
      double m = 0, b = 0;
      for (const auto& e : r.entries) {
        if (e.scenario != s) continue;
        m += e.meta_return;
        b += e.baseline_return;
      }
      m /= 3.0;
      b /= 3.0;
      scenario_wins += m > b;
      CHECK(r.scenarios[s].meta_mean == doctest::Approx(m));
    }
    CHECK(r.entry_meta_wins == wins);
    CHECK(r.entry_baseline_wins == losses);
    CHECK(r.entry_ties == ties);
    CHECK(r.scenario_meta_wins == scenario_wins);
  }
  SUBCASE("held-out scenarios must be disjoint from training") {
    CHECK_THROWS_AS(evaluate_adaptation(init, other, pool, pool, 8, 1, 0.01, settings(), 4), ValidationError);
  }
}
