#include "voltmarket/harness/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "voltmarket/errors.hpp"
#include "voltmarket/harness/format.hpp"
#include "voltmarket/harness/manifest.hpp"
#include "voltmarket/harness/serialization.hpp"
#include "voltmarket/harness/traces_csv.hpp"
#include "voltmarket/parallel.hpp"

namespace voltmarket::harness {

using nlohmann::json;

namespace {

constexpr std::uint64_t kMetaInitStream = 0x1417;
constexpr std::uint64_t kAdaptEvalStream = 0xe7a1;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json episode_stats(const EpisodeRecord& ep) {
  const ObjectiveReturns sums = objective_returns(ep);
  const AlignmentMetrics align = alignment_metrics(ep);
  return json{{"sum_r1", sums.sum_r1},
              {"sum_r2", sums.sum_r2},
              {"sum_total", sums.sum_total},
              {"mean_squared_mismatch", mean_squared_mismatch(ep)},
              {"rmse", align.rmse},
              {"pearson", optional_number(align.pearson)}};
}

AdaptSettings adapt_settings(const ExperimentConfig& c) {
  AdaptSettings s;
  s.gamma = c.agent.gamma;
  s.epsilon_start = c.agent.epsilon_start;
  s.epsilon_end = c.agent.epsilon_end;
  s.grid = c.agent.grid();
  s.reward = c.reward;
  return s;
}

const MetaSettings& require_meta(const ExperimentConfig& c) {
  if (!c.meta) throw ValidationError({"meta: section required for this subcommand"});
  return *c.meta;
}

std::optional<json> read_json_if_present(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pool(ArtifactWriter& w, const ExperimentConfig& c, const Pools& pools) {
  w.write_json("pool.json", pool_to_json(pools.training, pools.heldout, c.pool.base_seed, c.pool.heldout_base_seed));
}

void run_validate(const ExperimentConfig& c, const Pools& pools, ArtifactWriter& w) {
  w.write_json("validation.json", json{{"valid", true},
                                       {"training_scenarios", pools.training.size()},
                                       {"heldout_scenarios", pools.heldout.size()},
                                       {"meta_configured", c.meta.has_value()},
                                       {"tradeoff_bands", c.tradeoff_bands.empty() ? 4 : c.tradeoff_bands.size()}});
}

void run_train(const ExperimentConfig& c, const Pools& pools, ArtifactWriter& w, std::size_t workers,
               std::ostream& out) {
  const Scenario& scenario = pools.training.at(c.pool.train_scenario);
  const PriceGrid grid = c.agent.grid();
  const auto seeds = run_seeds(c);

  struct SeedRun {
    TrainResult trained;
    EpisodeRecord eval;
  };
  std::vector<SeedRun> runs(seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    runs[i].trained = train_agent(scenario, c.agent, c.reward, seeds[i]);
    runs[i].eval = evaluate_greedy(runs[i].trained.params, grid, scenario, c.reward);
  });
  const EpisodeRecord baseline = evaluate_fixed_price(scenario.reference_price, scenario, c.reward);

  ViolationLog training_log;
  json per_seed = json::array();
  double msm_sum = 0.0, pearson_sum = 0.0, return_sum = 0.0;
  std::size_t pearson_n = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& log = runs[i].trained.violations.entries;
    training_log.entries.insert(training_log.entries.end(), log.begin(), log.end());
    json stats = episode_stats(runs[i].eval);
    stats["seed"] = seeds[i];
    stats["training_violations"] = log.size();
    per_seed.push_back(stats);
    msm_sum += mean_squared_mismatch(runs[i].eval);
    return_sum += episode_return(runs[i].eval);
    if (auto r = alignment_metrics(runs[i].eval).pearson) {
      pearson_sum += *r;
      ++pearson_n;
    }
    w.write_text("episodes/agent_seed" + std::to_string(i) + ".csv", episode_csv(runs[i].eval));
  }
  w.write_text("episodes/baseline.csv", episode_csv(baseline));

  const double n = static_cast<double>(seeds.size());
  const double base_msm = mean_squared_mismatch(baseline);
  const auto base_pearson = alignment_metrics(baseline).pearson;
  const double agent_msm = msm_sum / n;
  json summary{{"scenario_index", c.pool.train_scenario},
               {"scenario_seed", scenario.seed},
               {"reference_price", scenario.reference_price},
               {"baseline", episode_stats(baseline)},
               {"agent", per_seed},
               {"agent_mean_squared_mismatch", agent_msm},
               {"agent_mean_return", return_sum / n},
               {"agent_mean_pearson", pearson_n ? json(pearson_sum / static_cast<double>(pearson_n)) : json(nullptr)},
               {"mismatch_reduction", base_msm > 0.0 ? json(1.0 - agent_msm / base_msm) : json(nullptr)}};

  json violations{{"training", violations_to_json(training_log)}};
  if (!c.raw_prices.empty()) {
    const RawPriceEvaluation raw = evaluate_raw_prices(c.raw_prices, grid, scenario, c.reward);
    violations["raw_price_evaluation"] = violations_to_json(raw.violations);
    summary["raw_price_evaluation"] = episode_stats(raw.episode);
    w.write_text("episodes/raw_prices.csv", episode_csv(raw.episode));
  }

  PolicyFile policy{runs.front().trained.params, grid, c.horizon};
  w.write_json("policy.json", policy_to_json(policy));
  w.write_json("violations.json", violations);
  w.write_json("summary.json", summary);
  out << "train: mean squared mismatch " << format_double(agent_msm) << " (baseline " << format_double(base_msm)
      << ")" << (base_pearson ? ", baseline pearson " + format_double(*base_pearson) : std::string()) << "\n";
}

PolicyParams meta_initialization(const ExperimentConfig& c, const Pools& pools) {
  return initial_params(pools.training, c.agent.grid(), c.agent.warmup_steps, c.agent.init_scale,
                        derive_seed(c.seed, kMetaInitStream));
}

void run_meta_train(const ExperimentConfig& c, const Pools& pools, ArtifactWriter& w, std::size_t workers,
                    std::ostream& out) {
  const MetaSettings& meta = require_meta(c);
  const PolicyParams init = meta_initialization(c, pools);
  const MetaResult result = meta_train(pools.training, init, meta.config, adapt_settings(c), c.seed, workers);

  json log = json::array();
  for (const auto& it : result.log) {
    log.push_back({{"iteration", it.iteration},
                   {"tasks", it.tasks},
                   {"eval_return", it.eval_return},
                   {"rolling_mean", it.rolling_mean}});
  }
  w.write_json("meta_policy.json", policy_to_json({result.init, c.agent.grid(), c.horizon}));
  w.write_json("meta_log.json", json{{"stop_condition", to_string(result.stop)},
                                     {"iterations", result.iterations},
                                     {"performance_threshold", meta.config.performance_threshold},
                                     {"log", log}});
  out << "meta-train: " << result.iterations << " iterations, stopped by " << to_string(result.stop) << "\n";
}

void run_evaluate(const ExperimentConfig& c, const Pools& pools, ArtifactWriter& w, std::size_t workers,
                  std::ostream& out) {
  const MetaSettings& meta = require_meta(c);
  const auto meta_path = w.root() / "meta_policy.json";
  if (!std::filesystem::exists(meta_path)) {
    throw std::runtime_error("evaluate: " + meta_path.string() + " not found; run meta-train first");
  }
  const PolicyFile meta_policy = load_policy(meta_path);
  const PolicyParams baseline = meta_initialization(c, pools);
  const SampleEfficiencyReport report =
      evaluate_adaptation(meta_policy.params, baseline, pools.heldout, pools.training, meta.adapt_steps, c.n_seeds,
                          meta.config.inner_lr, adapt_settings(c), derive_seed(c.seed, kAdaptEvalStream), workers);
  w.write_json("sample_efficiency.json", sample_efficiency_to_json(report));
  w.write_text("sample_efficiency.csv", sample_efficiency_csv(report));
  out << "evaluate: meta-initialization wins " << report.scenario_meta_wins << " of " << report.scenarios.size()
      << " held-out scenarios\n";
}

void run_tradeoff(const ExperimentConfig& c, const Pools& pools, ArtifactWriter& w, std::size_t workers,
                  std::ostream& out) {
  const Scenario& scenario = pools.training.at(c.pool.train_scenario);
  const auto bands = c.tradeoff_bands.empty() ? default_bands(c) : c.tradeoff_bands;
  const auto seeds = run_seeds(c);
  const auto rows = train_constraint_family(bands, scenario, c.agent, c.reward, seeds, workers);

  json table = json::array();
  for (const auto& r : rows) {
    json row{{"p_min", r.level.p_min},
             {"p_max", r.level.p_max},
             {"mean_return", r.mean_return},
             {"mean_sum_r1", r.mean_sum_r1},
             {"mean_sum_r2", r.mean_sum_r2},
             {"seed_returns", r.seed_returns},
             {"training_violations", r.violations}};
    if (r.level.p_min == r.level.p_max) {
      const double fixed = episode_return(evaluate_fixed_price(r.level.p_min, scenario, c.reward));
      row["fixed_price_return"] = fixed;
      bool exact = true;
      for (double x : r.seed_returns) exact = exact && x == fixed;
      row["matches_fixed_price"] = exact;
    }
    table.push_back(row);
  }
  w.write_text("tradeoff.csv", tradeoff_csv(rows));
  w.write_json("tradeoff.json", json{{"scenario_index", c.pool.train_scenario}, {"seeds", seeds}, {"rows", table}});
  out << "tradeoff: " << rows.size() << " constraint levels\n";
}

void run_report(const ExperimentConfig&, ArtifactWriter& w, std::ostream& out) {
  json report = json::object();
  std::string csv = "section,key,value\n";
  auto add = [&](const std::string& section, const std::string& key, const json& value) {
    report[section][key] = value;
    csv += section + ',' + key + ',' + (value.is_string() ? value.get<std::string>() : value.dump()) + '\n';
  };

  if (auto s = read_json_if_present(w.root() / "summary.json")) {
    add("train", "baseline_mean_squared_mismatch", (*s)["baseline"]["mean_squared_mismatch"]);
    add("train", "agent_mean_squared_mismatch", (*s)["agent_mean_squared_mismatch"]);
    add("train", "mismatch_reduction", (*s)["mismatch_reduction"]);
    add("train", "baseline_pearson", (*s)["baseline"]["pearson"]);
    add("train", "agent_mean_pearson", (*s)["agent_mean_pearson"]);
    add("train", "agent_mean_return", (*s)["agent_mean_return"]);
  }
  if (auto v = read_json_if_present(w.root() / "violations.json")) {
    add("safety", "training_violations", (*v)["training"]["summary"]["count"]);
    if (v->contains("raw_price_evaluation")) {
      const json& raw = (*v)["raw_price_evaluation"]["summary"];
      add("safety", "raw_price_violations", raw["count"]);
      add("safety", "raw_price_max_abs", raw["max_abs"]);
      add("safety", "raw_price_sum_abs", raw["sum_abs"]);
    }
  }
  if (auto m = read_json_if_present(w.root() / "meta_log.json")) {
    add("meta", "stop_condition", (*m)["stop_condition"]);
    add("meta", "iterations", (*m)["iterations"]);
  }
  if (auto e = read_json_if_present(w.root() / "sample_efficiency.json")) {
    add("sample_efficiency", "scenario_meta_wins", (*e)["scenario_meta_wins"]);
    add("sample_efficiency", "heldout_scenarios", e->at("scenarios").size());
    add("sample_efficiency", "pooled_meta_mean", (*e)["pooled_meta_mean"]);
    add("sample_efficiency", "pooled_baseline_mean", (*e)["pooled_baseline_mean"]);
  }
  if (auto t = read_json_if_present(w.root() / "tradeoff.json")) {
    for (const auto& row : (*t)["rows"]) {
      const std::string key = "band_" + format_double(row["p_min"].get<double>()) + "_" +
                              format_double(row["p_max"].get<double>());
      add("tradeoff", key, row["mean_return"]);
    }
  }
  if (report.empty()) throw std::runtime_error("report: no prior outputs found in " + w.root().string());
  w.write_json("report.json", report);
  w.write_text("report.csv", csv);
  out << "report: merged " << report.size() << " sections\n";
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  if (name == "validate") return Subcommand::validate;
  if (name == "build-pool") return Subcommand::build_pool;
  if (name == "train") return Subcommand::train;
  if (name == "meta-train") return Subcommand::meta_train;
  if (name == "evaluate") return Subcommand::evaluate;
  if (name == "tradeoff") return Subcommand::tradeoff;
  if (name == "report") return Subcommand::report;
  return std::nullopt;
}

std::string_view to_string(Subcommand sub) {
  switch (sub) {
    case Subcommand::validate: return "validate";
    case Subcommand::build_pool: return "build-pool";
    case Subcommand::train: return "train";
    case Subcommand::meta_train: return "meta-train";
    case Subcommand::evaluate: return "evaluate";
    case Subcommand::tradeoff: return "tradeoff";
    case Subcommand::report: return "report";
  }
  return "unknown";
}

std::size_t worker_count_from_env() {
  if (const char* env = std::getenv("VOLTMARKET_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Pools build_pools(const ExperimentConfig& config) {
  Pools pools;
  pools.training = build_scenario_pool(config.pool.pool, config.pool.base_seed);
  PoolConfig heldout_cfg = config.pool.pool;
  heldout_cfg.count = config.pool.heldout_count;
  pools.heldout = build_scenario_pool(heldout_cfg, config.pool.heldout_base_seed);

  if (config.traces_path) {
    ScenarioTraces ingested;
    try {
      ingested = ingest_traces(*config.traces_path, config.horizon.timestep_minutes);
    } catch (const FormatError& e) {
      throw ValidationError({std::string("paths.traces: ") + e.what()});
    }
    for (auto* pool : {&pools.training, &pools.heldout}) {
      for (auto& s : *pool) {
        s.traces.weather = ingested.weather;
        s.traces.purchase_price = ingested.purchase_price;
        s.traces.start_minute = ingested.start_minute;
      }
    }
  }

  std::vector<std::string> problems;
  for (auto* pool : {&pools.training, &pools.heldout}) {
    const char* name = pool == &pools.training ? "training" : "heldout";
    for (std::size_t i = 0; i < pool->size(); ++i) {
      for (const auto& v : (*pool)[i].violations()) {
        problems.push_back(std::string(name) + " scenario " + std::to_string(i) + ": " + v);
      }
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return pools;
}

std::vector<std::uint64_t> run_seeds(const ExperimentConfig& config) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < config.n_seeds; ++i) seeds.push_back(config.seed + i);
  return seeds;
}

std::vector<ConstraintLevel> default_bands(const ExperimentConfig& config) {
  const Price ref = config.pool.pool.reference_price;
  const Price lo = std::min(config.agent.p_min, ref);
  const Price hi = std::max(config.agent.p_max, ref);
  std::vector<ConstraintLevel> bands;
  for (int k = 0; k <= 3; ++k) {
    const double f = static_cast<double>(k) / 3.0;
    bands.push_back({k == 3 ? lo : ref - (ref - lo) * f, k == 3 ? hi : ref + (hi - ref) * f});
  }
  return bands;
}

int run_experiment(Subcommand sub, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig config = load_config(options.config_path);
    if (options.out_dir) config.output_dir = *options.out_dir;
    if (options.seed) config.seed = *options.seed;
    const std::size_t workers = options.workers.value_or(worker_count_from_env());

    ArtifactWriter writer(config.output_dir);
    if (sub == Subcommand::report) {
      run_report(config, writer, out);
      writer.write_manifest(to_string(sub));
      return kExitOk;
    }
    if (sub == Subcommand::meta_train || sub == Subcommand::evaluate) require_meta(config);

    const Pools pools = build_pools(config);
    switch (sub) {
      case Subcommand::validate:
        run_validate(config, pools, writer);
        break;
      case Subcommand::build_pool:
        write_pool(writer, config, pools);
        break;
      case Subcommand::train:
        write_pool(writer, config, pools);
        run_train(config, pools, writer, workers, out);
        break;
      case Subcommand::meta_train:
        write_pool(writer, config, pools);
        run_meta_train(config, pools, writer, workers, out);
        break;
      case Subcommand::evaluate:
        run_evaluate(config, pools, writer, workers, out);
        break;
      case Subcommand::tradeoff:
        run_tradeoff(config, pools, writer, workers, out);
        break;
      case Subcommand::report:
        break;
    }
    writer.write_manifest(to_string(sub));
    return kExitOk;
  } catch (const ValidationError& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace voltmarket::harness
