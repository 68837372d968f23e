// Acceptance checks for the simulator. Prints one PASS/FAIL line per
// criterion and exits non-zero if any criterion fails.
//
// Usage: acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../oracles.hpp"
#include "voltmarket/customers.hpp"
#include "voltmarket/errors.hpp"
#include "voltmarket/grid_env.hpp"
#include "voltmarket/harness/config.hpp"
#include "voltmarket/harness/experiment.hpp"
#include "voltmarket/harness/format.hpp"
#include "voltmarket/parallel.hpp"
#include "voltmarket/pricing_agent.hpp"
#include "voltmarket/reward.hpp"
#include "voltmarket/rng.hpp"
#include "voltmarket/telemetry.hpp"
#include "voltmarket/training.hpp"

using namespace voltmarket;
using namespace voltmarket::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path work;
  fs::path config_path;
  ExperimentConfig config;
  Pools pools;
  std::size_t workers = 1;
  // Filled by the demand-shifting run and reused by the safety check.
  std::vector<ViolationLog> training_logs;
  bool training_ran = false;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_sub(const Context& ctx, Subcommand sub, const fs::path& out_dir, std::size_t workers) {
  RunOptions opt;
  opt.config_path = ctx.config_path;
  opt.out_dir = out_dir;
  opt.workers = workers;
  std::ostringstream out, err;
  const int rc = run_experiment(sub, opt, out, err);
  if (rc != 0) std::cerr << to_string(sub) << " failed (" << rc << "): " << err.str();
  return rc;
}

bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// 1 -------------------------------------------------------------------------
Verdict reward_fidelity(Context&) {
  Rng rng(101);
  std::size_t mismatches = 0, sign_errors = 0, zero_errors = 0, balanced = 0;
  for (int i = 0; i < 100000; ++i) {
    const double ps = rng.uniform(0.0, 1.0);
    const double pp = rng.uniform(0.0, 1.0);
    const double renewable = rng.uniform(0.0, 500.0);
    const double demand = i % 10 == 0 ? renewable : rng.uniform(0.0, 500.0);
    const RewardWeights w{rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};

    const double r1_ref = ps - pp;
    const double r2_ref = -std::pow(renewable - demand, 2.0);
    const double total_ref = w.alpha1 * r1_ref + w.alpha2 * r2_ref;

    const double r1 = reward_r1(ps, pp);
    const double r2 = reward_r2(renewable, demand);
    const double total = reward_total(r1, r2, w);
    const RewardBreakdown via = compute_reward(ps, pp, renewable, demand, {w, R1Mode::price_diff});

    if (!close_abs(r1, r1_ref, 1e-12) || !close_abs(r2, r2_ref, 1e-12) || !close_abs(total, total_ref, 1e-12) ||
        !close_abs(via.r1, r1_ref, 1e-12) || !close_abs(via.r2, r2_ref, 1e-12) ||
        !close_abs(via.total, total_ref, 1e-12))
      ++mismatches;
    if (r2 > 0.0) ++sign_errors;
    if ((r2 == 0.0) != (renewable == demand)) ++zero_errors;
    balanced += renewable == demand;
  }
  return {mismatches == 0 && sign_errors == 0 && zero_errors == 0,
          "1e5 tuples, " + std::to_string(mismatches) + " mismatches at 1e-12, " + std::to_string(sign_errors) +
              " positive r2, " + std::to_string(zero_errors) + " zero-iff-balanced errors (" +
              std::to_string(balanced) + " balanced tuples)"};
}

// 2 -------------------------------------------------------------------------
Verdict dp_optimality(Context&) {
  Rng rng(202);
  std::size_t unequal = 0;
  std::size_t max_h = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t h = 1 + rng.index(6);
    const int levels = 2 + static_cast<int>(rng.index(4));
    max_h = std::max(max_h, h);
    Battery b;
    b.capacity = rng.uniform(1.0, 10.0);
    b.max_charge_rate = rng.uniform(0.1, 1.0) * b.capacity;
    b.max_discharge_rate = rng.uniform(0.1, 1.0) * b.capacity;
    b.charge_efficiency = rng.uniform(0.6, 1.0);
    b.discharge_efficiency = rng.uniform(0.6, 1.0);
    b.soc = rng.uniform(0.0, b.capacity);
    std::vector<double> prices(h), base(h);
    for (std::size_t t = 0; t < h; ++t) {
      prices[t] = rng.uniform(0.01, 0.6);
      base[t] = rng.uniform(0.0, 4.0);
    }
    const double lambda = inst % 4 == 0 ? 0.0 : rng.uniform(0.0, 1.5);
    const Schedule dp = dp_schedule(prices, base, b, levels, lambda);
    const auto best = oracle::enumerate_plans(
        prices, base, {b.capacity, b.max_charge_rate, b.max_discharge_rate, b.charge_efficiency,
                       b.discharge_efficiency, b.soc},
        levels, lambda);
    if (dp.cost != best.cost) ++unequal;
  }
  return {unequal == 0, "200 instances (horizon <= " + std::to_string(max_h) + ", soc_levels <= 5), " +
                            std::to_string(unequal) + " differ from exhaustive enumeration"};
}

// 3 -------------------------------------------------------------------------
Verdict td_correctness(Context&) {
  const auto mdp = oracle::three_state_chain();
  const double gamma = 0.9;
  const auto q_star = oracle::value_iteration_q(mdp, gamma);
  auto hot = [](int s) {
    std::vector<double> x(3, 0.0);
    x[static_cast<std::size_t>(s)] = 1.0;
    return x;
  };
  auto p = PolicyParams::zeros(2, 3);
  std::size_t updates = 0;
  while (updates < 10000) {
    const int s = static_cast<int>((updates / 2) % 3);
    const int a = static_cast<int>(updates % 2);
    td_update(p, {hot(s), static_cast<std::size_t>(a), mdp.reward[s * 2 + a], hot(mdp.next[s * 2 + a]), false}, 0.5,
              gamma);
    ++updates;
  }
  bool policy_ok = true;
  double worst = 0.0;
  for (int s = 0; s < 3; ++s) {
    const auto q = q_values(p, hot(s));
    const std::size_t star = q_star[s * 2 + 1] > q_star[s * 2] ? 1 : 0;
    policy_ok = policy_ok && greedy_index(q) == star;
    for (int a = 0; a < 2; ++a) worst = std::max(worst, std::abs(q[a] - q_star[s * 2 + a]));
  }
  return {policy_ok && worst < 1e-3, std::to_string(updates) + " updates, greedy policy " +
                                         (policy_ok ? "matches" : "differs from") +
                                         " value iteration, max |Q - Q*| = " + fmt(worst)};
}

// 4 -------------------------------------------------------------------------
Verdict demand_shifting(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const Scenario& scenario = ctx.pools.training.at(c.pool.train_scenario);
  std::size_t storage = 0, elastic = 0;
  for (const auto& cust : scenario.customers) (cust.kind == CustomerKind::storage ? storage : elastic)++;

  const auto seeds = run_seeds(c);
  const PriceGrid grid = c.agent.grid();
  std::vector<TrainResult> trained(seeds.size());
  std::vector<EpisodeRecord> evals(seeds.size());
  parallel_for(seeds.size(), ctx.workers, [&](std::size_t i) {
    trained[i] = train_agent(scenario, c.agent, c.reward, seeds[i]);
    evals[i] = evaluate_greedy(trained[i].params, grid, scenario, c.reward);
  });
  for (const auto& t : trained) ctx.training_logs.push_back(t.violations);
  ctx.training_ran = true;

  const EpisodeRecord baseline = evaluate_fixed_price(scenario.reference_price, scenario, c.reward);
  // Mean -r2, recomputed from the step records.
  auto mean_neg_r2 = [](const EpisodeRecord& ep) {
    double acc = 0.0;
    for (const auto& s : ep.steps) acc += -s.r2;
    return acc / static_cast<double>(ep.steps.size());
  };
  auto pearson = [](const EpisodeRecord& ep) {
    std::vector<double> r, d;
    for (const auto& s : ep.steps) {
      r.push_back(s.e_renewable);
      d.push_back(s.e_demand);
    }
    const auto m = oracle::moments(r, d);
    return m.cov / std::sqrt(m.var_a * m.var_b);
  };
  double agent_mismatch = 0.0, agent_pearson = 0.0;
  bool lengths_ok = baseline.steps.size() == scenario.episode_length;
  for (const auto& ep : evals) {
    agent_mismatch += mean_neg_r2(ep) / static_cast<double>(evals.size());
    agent_pearson += pearson(ep) / static_cast<double>(evals.size());
    lengths_ok = lengths_ok && ep.steps.size() == scenario.episode_length;
  }
  const double base_mismatch = mean_neg_r2(baseline);
  const double base_pearson = pearson(baseline);
  const double reduction = 1.0 - agent_mismatch / base_mismatch;
  const bool pass = lengths_ok && storage > 0 && elastic > 0 && scenario.episode_length == 168 &&
                    seeds.size() == 10 && reduction >= 0.10 && agent_pearson > base_pearson;
  return {pass, "scenario " + std::to_string(c.pool.train_scenario) + " (" + std::to_string(storage) + " storage, " +
                    std::to_string(elastic) + " elastic), mean -r2 " + fmt(base_mismatch) + " -> " +
                    fmt(agent_mismatch) + " (reduction " + fmt(100.0 * reduction) + "%, need >= 10%), pearson " +
                    fmt(base_pearson) + " -> " + fmt(agent_pearson) + " over " + std::to_string(seeds.size()) +
                    " seeds"};
}

// 5 -------------------------------------------------------------------------
Verdict meta_sample_efficiency(Context& ctx) {
  const fs::path out = ctx.work / "meta";
  fs::remove_all(out);
  if (run_sub(ctx, Subcommand::meta_train, out, ctx.workers) != 0) return {false, "meta-train failed"};
  if (run_sub(ctx, Subcommand::evaluate, out, ctx.workers) != 0) return {false, "evaluate failed"};
  const json r = json::parse(read_file(out / "sample_efficiency.json"));

  // Recount scenario wins from the per-entry table.
  const std::size_t n_heldout = r["scenarios"].size();
  std::vector<double> meta(n_heldout, 0.0), base(n_heldout, 0.0);
  std::vector<std::size_t> per(n_heldout, 0);
  for (const auto& e : r["entries"]) {
    const std::size_t s = e["scenario"].get<std::size_t>();
    meta[s] += e["meta_return"].get<double>();
    base[s] += e["baseline_return"].get<double>();
    per[s]++;
  }
  std::size_t wins = 0;
  bool seeds_ok = true;
  for (std::size_t s = 0; s < n_heldout; ++s) {
    wins += meta[s] > base[s];
    seeds_ok = seeds_ok && per[s] == 10;
  }
  const std::size_t k = r["k_steps"].get<std::size_t>();
  const bool shape_ok = ctx.pools.training.size() == 8 && n_heldout == 5 && k == 50 && seeds_ok;
  const bool pass = shape_ok && wins >= 4 && wins == r["scenario_meta_wins"].get<std::size_t>();
  return {pass, "pool " + std::to_string(ctx.pools.training.size()) + ", " + std::to_string(n_heldout) +
                    " held-out, " + std::to_string(k) + " adaptation steps, 10 seeds each: meta-initialization wins " +
                    std::to_string(wins) + "/" + std::to_string(n_heldout) + " (need >= 4)"};
}

// 6 -------------------------------------------------------------------------
Verdict safety_accounting(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const PriceGrid grid = c.agent.grid();
  const Scenario& scenario = ctx.pools.training.at(c.pool.train_scenario);

  std::size_t grid_violations = 0;
  for (const auto& log : ctx.training_logs) grid_violations += log.entries.size();
  const bool grid_ok = ctx.training_ran && grid_violations == 0;

  Rng rng(606);
  std::vector<Price> raw(97);
  for (auto& p : raw) p = rng.uniform(-0.2, 0.8);
  const RawPriceEvaluation res = evaluate_raw_prices(raw, grid, scenario, c.reward);
  const ViolationSummary got = summarize_violations(res.violations);
  std::size_t count = 0, lower = 0, upper = 0;
  double max_abs = 0.0, sum_abs = 0.0;
  for (std::size_t t = 0; t < scenario.episode_length; ++t) {
    const Price p = raw[t % raw.size()];
    double excess = 0.0;
    if (p < grid.p_min) {
      excess = grid.p_min - p;
      ++lower;
    } else if (p > grid.p_max) {
      excess = p - grid.p_max;
      ++upper;
    } else {
      continue;
    }
    ++count;
    max_abs = std::max(max_abs, excess);
    sum_abs += excess;
  }
  const bool recount_ok = got.count == count && got.lower_count == lower && got.upper_count == upper &&
                          got.max_abs == max_abs && got.sum_abs == sum_abs && count > 0;

  std::size_t idem_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const Price p = rng.uniform(-1.0, 1.5);
    const ClampResult once = clamp_price(p, grid);
    const ClampResult twice = clamp_price(once.price, grid);
    const bool inside = p >= grid.p_min && p <= grid.p_max;
    if (twice.price != once.price || twice.violated || once.violated == inside ||
        once.price < grid.p_min || once.price > grid.p_max || (inside && once.price != p))
      ++idem_failures;
  }
  return {grid_ok && recount_ok && idem_failures == 0,
          "grid-mode training violations " + std::to_string(grid_violations) + " over " +
              std::to_string(ctx.training_logs.size()) + " full runs; raw-price summary " +
              (recount_ok ? "equals" : "differs from") + " recount (" + std::to_string(count) +
              " violations, sum " + fmt(sum_abs) + "); clamp idempotence failures " +
              std::to_string(idem_failures) + "/10000"};
}

// 7 -------------------------------------------------------------------------
Verdict tradeoff_table(Context& ctx) {
  const fs::path out = ctx.work / "tradeoff";
  fs::remove_all(out);
  if (run_sub(ctx, Subcommand::tradeoff, out, ctx.workers) != 0) return {false, "tradeoff failed"};

  std::istringstream csv(read_file(out / "tradeoff.csv"));
  std::string line;
  std::getline(csv, line);
  bool header_ok = line == "p_min,p_max,mean_return,mean_sum_r1,mean_sum_r2";
  std::vector<std::vector<double>> rows;
  while (std::getline(csv, line)) {
    std::vector<double> row;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) {
      const auto v = parse_double(f);
      if (!v || !std::isfinite(*v)) header_ok = false;
      row.push_back(v.value_or(NAN));
    }
    if (row.size() != 5) header_ok = false;
    rows.push_back(row);
  }
  bool nested = rows.size() == 4;
  for (std::size_t i = 1; nested && i < rows.size(); ++i)
    nested = rows[i][0] <= rows[i - 1][0] && rows[i][1] >= rows[i - 1][1];

  const json t = json::parse(read_file(out / "tradeoff.json"));
  const Scenario& scenario = ctx.pools.training.at(ctx.config.pool.train_scenario);
  std::size_t degenerate = 0, exact = 0, compared = 0;
  for (const auto& row : t["rows"]) {
    const double lo = row["p_min"].get<double>(), hi = row["p_max"].get<double>();
    if (lo != hi) continue;
    ++degenerate;
    const double fixed = episode_return(evaluate_fixed_price(lo, scenario, ctx.config.reward));
    for (const auto& r : row["seed_returns"]) {
      ++compared;
      exact += r.get<double>() == fixed;
    }
  }
  const bool pass = header_ok && nested && degenerate >= 1 && compared > 0 && exact == compared;
  return {pass, std::to_string(rows.size()) + " nested bands, table " + (header_ok ? "complete" : "incomplete") +
                    "; degenerate band matches fixed-price return bit-exactly on " + std::to_string(exact) + "/" +
                    std::to_string(compared) + " seeds"};
}

// 8 -------------------------------------------------------------------------
Verdict env_invariants(Context& ctx) {
  Rng rng(808);
  const PriceGrid grid = ctx.config.agent.grid();
  std::size_t steps = 0, soc_bad = 0, window_bad = 0, length_bad = 0, episodes = 0, lifecycle_bad = 0;
  std::size_t which = 0;
  while (steps < 100000) {
    const Scenario& s = ctx.pools.training[which++ % ctx.pools.training.size()];
    GridEnv env(s);
    StateWindow w = env.reset();
    std::size_t len = 0;
    while (!env.done()) {
      const Price p = rng.uniform01() < 0.9 ? grid.levels[rng.index(grid.size())] : rng.uniform(0.0, 1.0);
      const StepOutcome out = env.step({p, 0, false});
      ++len;
      ++steps;
      for (std::size_t i = 0; i < s.customers.size(); ++i) {
        if (!s.customers[i].battery) continue;
        const double soc = env.soc()[i];
        if (!(soc >= 0.0 && soc <= s.customers[i].battery->capacity)) ++soc_bad;
      }
      const StateWindow& n = out.next_state;
      if (!n.well_formed() || n.length() != s.horizon.window() || n.t != env.t() ||
          (out.done != (len == s.episode_length)))
        ++window_bad;
      w = n;
    }
    ++episodes;
    if (len != s.episode_length) ++length_bad;
    try {
      env.step({0.1, 0, false});
      ++lifecycle_bad;
    } catch (const LifecycleError&) {
    }
  }
  const bool pass = soc_bad == 0 && window_bad == 0 && length_bad == 0 && lifecycle_bad == 0;
  return {pass, std::to_string(steps) + " steps over " + std::to_string(episodes) + " episodes: " +
                    std::to_string(soc_bad) + " SOC violations, " + std::to_string(window_bad) +
                    " window violations, " + std::to_string(length_bad) + " wrong episode lengths"};
}

// 9 -------------------------------------------------------------------------
Verdict determinism(Context& ctx) {
  const Subcommand order[] = {Subcommand::validate,   Subcommand::build_pool, Subcommand::train,
                              Subcommand::meta_train, Subcommand::evaluate,   Subcommand::tradeoff,
                              Subcommand::report};
  const fs::path a = ctx.work / "repeat_a", b = ctx.work / "repeat_b";
  fs::remove_all(a);
  fs::remove_all(b);
  std::size_t identical = 0, total = 0;
  std::string differing;
  for (Subcommand sub : order) {
    ++total;
    // The two runs use different worker counts on purpose.
    if (run_sub(ctx, sub, a, 1) != 0 || run_sub(ctx, sub, b, 3) != 0) {
      differing += std::string(" ") + std::string(to_string(sub)) + "(failed)";
      continue;
    }
    const std::string ma = read_file(a / "manifest.json"), mb = read_file(b / "manifest.json");
    if (!ma.empty() && ma == mb) {
      ++identical;
    } else {
      differing += std::string(" ") + std::string(to_string(sub));
    }
  }
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " subcommands produce byte-identical manifests across repeat runs" +
                                  (differing.empty() ? "" : "; differing:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "voltmarket_acceptance";
  fs::create_directories(ctx.work);
  ctx.config_path = fs::path(VOLTMARKET_SOURCE_DIR) / "configs" / "default.json";
  try {
    ctx.config = load_config(ctx.config_path);
    ctx.pools = build_pools(ctx.config);
  } catch (const std::exception& e) {
    std::cout << "FAIL  setup: " << e.what() << "\n";
    return 1;
  }
  ctx.workers = worker_count_from_env();

  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 = no runtime bound
    std::function<Verdict(Context&)> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "reward fidelity", 1.0, reward_fidelity},
      {2, "customer DP optimality", 10.0, dp_optimality},
      {3, "TD correctness", 5.0, td_correctness},
      {4, "demand shifting", 300.0, demand_shifting},
      {5, "meta-learning sample efficiency", 600.0, meta_sample_efficiency},
      {6, "safety accounting", 0.0, safety_accounting},
      {7, "trade-off table", 0.0, tradeoff_table},
      {8, "battery and environment invariants", 0.0, env_invariants},
      {9, "determinism", 0.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.fn(ctx);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(secs) + " s";
    if (c.limit_s > 0.0) {
      timing += secs < c.limit_s ? " < " : " >= ";
      timing += fmt(c.limit_s) + " s";
      if (secs >= c.limit_s) v.pass = false;
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << v.detail << " [" << timing
              << "]" << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
