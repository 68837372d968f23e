#include "voltmarket/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "voltmarket/errors.hpp"

namespace voltmarket::harness {

using nlohmann::json;

namespace {

/// Reads optional fields of one JSON object, collecting type errors and
/// unknown keys instead of stopping at the first one.
class Section {
 public:
  Section(const json& root, const std::string& name, std::vector<std::string>& problems)
      : name_(name), problems_(problems) {
    if (!root.contains(name)) return;
    const json& node = root.at(name);
    if (!node.is_object()) {
      problems_.push_back(name + ": must be an object");
      return;
    }
    node_ = &node;
  }

  bool present() const { return node_ != nullptr; }
  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  void read(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        bad(key, "a number");
      }
    }
  }

  void read(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (v->is_number_integer()) {
        out = v->get<int>();
      } else {
        bad(key, "an integer");
      }
    }
  }

  void read(const std::string& key, std::size_t& out) {
    if (const json* v = get(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::size_t>();
      } else {
        bad(key, "a non-negative integer");
      }
    }
  }

  void read_u64(const std::string& key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        bad(key, "a non-negative integer");
      }
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        bad(key, "a string");
      }
    }
  }

  void read(const std::string& key, SweepRange& out) {
    if (const json* v = get(key)) {
      if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
        out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
      } else {
        bad(key, "a [lo, hi] pair of numbers");
      }
    }
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) {
        bad(key, "an array of numbers");
        return;
      }
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) {
          bad(key, "an array of numbers");
          return;
        }
        out.push_back(x.get<double>());
      }
    }
  }

  const json* raw(const std::string& key) { return get(key); }

  void finish() {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!seen_.contains(key)) problems_.push_back(name_ + "." + key + ": unknown field");
    }
  }

 private:
  const json* get(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  void bad(const std::string& key, const char* what) { problems_.push_back(name_ + "." + key + ": must be " + what); }

  const json* node_ = nullptr;
  std::string name_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

std::filesystem::path anchor(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::vector<std::string> config_violations(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto add = [&](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };

  if (!(c.reward.weights.alpha1 >= 0.0 && std::isfinite(c.reward.weights.alpha1)))
    out.emplace_back("reward.alpha1 must be finite and >= 0");
  if (!(c.reward.weights.alpha2 >= 0.0 && std::isfinite(c.reward.weights.alpha2)))
    out.emplace_back("reward.alpha2 must be finite and >= 0");

  const AgentConfig& a = c.agent;
  if (a.levels < 2) out.emplace_back("agent.levels must be >= 2");
  if (!(a.p_min >= 0.0 && a.p_min < a.p_max && std::isfinite(a.p_max)))
    out.emplace_back("agent: need 0 <= p_min < p_max");
  if (!(a.lr > 0.0 && std::isfinite(a.lr))) out.emplace_back("agent.lr must be > 0");
  if (!(a.gamma >= 0.0 && a.gamma <= 1.0)) out.emplace_back("agent.gamma must be in [0, 1]");
  if (!(a.epsilon_start >= 0.0 && a.epsilon_start <= 1.0)) out.emplace_back("agent.epsilon_start must be in [0, 1]");
  if (!(a.epsilon_end >= 0.0 && a.epsilon_end <= 1.0)) out.emplace_back("agent.epsilon_end must be in [0, 1]");
  if (a.episodes == 0) out.emplace_back("agent.episodes must be > 0");
  if (a.warmup_steps == 0) out.emplace_back("agent.warmup_steps must be > 0");
  if (!(a.init_scale >= 0.0 && std::isfinite(a.init_scale))) out.emplace_back("agent.init_scale must be >= 0");

  add(c.pool.pool.violations());
  if (c.pool.heldout_count == 0) out.emplace_back("pool.heldout_count must be > 0");
  if (c.pool.train_scenario >= c.pool.pool.count) out.emplace_back("pool.train_scenario must index into the pool");
  // Scenario seeds are base_seed + index; the two pools must not share any.
  const auto lo_a = c.pool.base_seed, hi_a = c.pool.base_seed + c.pool.pool.count;
  const auto lo_b = c.pool.heldout_base_seed, hi_b = c.pool.heldout_base_seed + c.pool.heldout_count;
  if (lo_a < hi_b && lo_b < hi_a) out.emplace_back("pool: held-out seeds overlap the training pool seeds");

  if (c.meta) add(c.meta->config.violations(c.pool.pool.count));
  if (c.meta && c.meta->adapt_steps == 0) out.emplace_back("meta.adapt_steps must be > 0");

  for (std::size_t i = 0; i < c.tradeoff_bands.size(); ++i) {
    const auto& b = c.tradeoff_bands[i];
    if (!(b.p_min >= 0.0 && b.p_min <= b.p_max && std::isfinite(b.p_max)))
      out.push_back("tradeoff.bands[" + std::to_string(i) + "]: need 0 <= p_min <= p_max");
  }
  if (!c.tradeoff_bands.empty() && c.tradeoff_bands.size() < 2) out.emplace_back("tradeoff.bands: need at least two bands");
  for (double p : c.raw_prices) {
    if (!std::isfinite(p)) {
      out.emplace_back("evaluation.raw_prices must be finite");
      break;
    }
  }
  if (c.traces_path && !std::filesystem::is_regular_file(*c.traces_path))
    out.push_back("paths.traces: file not found: " + c.traces_path->string());
  if (c.n_seeds == 0) out.emplace_back("seeds.n_seeds must be > 0");
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("config is not valid JSON: ") + e.what()});
  }
  if (!root.is_object()) throw ValidationError({"config must be a JSON object"});

  std::vector<std::string> problems;
  ExperimentConfig c;

  static const std::set<std::string> kSections = {"horizon", "reward", "agent", "pool", "meta",
                                                  "tradeoff", "evaluation", "paths", "seeds"};
  for (const auto& [key, value] : root.items()) {
    if (!kSections.contains(key)) problems.push_back(key + ": unknown section");
  }

  Section horizon(root, "horizon", problems);
  horizon.read("p", c.horizon.p);
  horizon.read("timestep_minutes", c.horizon.timestep_minutes);
  horizon.finish();

  Section reward(root, "reward", problems);
  reward.read("alpha1", c.reward.weights.alpha1);
  reward.read("alpha2", c.reward.weights.alpha2);
  std::string mode = std::string(to_string(c.reward.r1_mode));
  reward.read("r1_mode", mode);
  if (auto m = parse_r1_mode(mode)) {
    c.reward.r1_mode = *m;
  } else {
    problems.push_back("reward.r1_mode: must be \"price_diff\" or \"energy_weighted\"");
  }
  reward.finish();

  Section agent(root, "agent", problems);
  agent.read("levels", c.agent.levels);
  agent.read("p_min", c.agent.p_min);
  agent.read("p_max", c.agent.p_max);
  agent.read("lr", c.agent.lr);
  agent.read("gamma", c.agent.gamma);
  agent.read("epsilon_start", c.agent.epsilon_start);
  agent.read("epsilon_end", c.agent.epsilon_end);
  agent.read("episodes", c.agent.episodes);
  agent.read("warmup_steps", c.agent.warmup_steps);
  agent.read("init_scale", c.agent.init_scale);
  agent.finish();

  Section pool(root, "pool", problems);
  PoolConfig& pc = c.pool.pool;
  pool.read("count", pc.count);
  pool.read("heldout_count", c.pool.heldout_count);
  pool.read_u64("base_seed", c.pool.base_seed);
  pool.read_u64("heldout_base_seed", c.pool.heldout_base_seed);
  pool.read("train_scenario", c.pool.train_scenario);
  pool.read("episode_length", pc.episode_length);
  pool.read("storage_fraction", pc.storage_fraction);
  pool.read("cooperative_fraction", pc.cooperative_fraction);
  pool.read("elasticity", pc.elasticity);
  pool.read("customer_count", pc.customer_count);
  pool.read("reference_price", pc.reference_price);
  pool.read("soc_levels", pc.soc_levels);
  pool.read("peak_weight", pc.peak_weight);
  pool.read("renewable_ratio", pc.renewable_ratio);
  pool.finish();
  pc.horizon = c.horizon;

  Section meta(root, "meta", problems);
  if (meta.present()) {
    MetaSettings m;
    meta.read("inner_steps", m.config.inner_steps);
    meta.read("inner_lr", m.config.inner_lr);
    meta.read("meta_lr", m.config.meta_lr);
    meta.read("meta_iterations", m.config.meta_iterations);
    meta.read("tasks_per_iteration", m.config.tasks_per_iteration);
    meta.read("threshold_window", m.config.threshold_window);
    meta.read("adapt_steps", m.adapt_steps);
    if (!meta.has("performance_threshold")) problems.emplace_back("meta.performance_threshold: required field");
    meta.read("performance_threshold", m.config.performance_threshold);
    c.meta = m;
  }
  meta.finish();

  Section tradeoff(root, "tradeoff", problems);
  if (const json* bands = tradeoff.raw("bands")) {
    bool ok = bands->is_array();
    if (ok) {
      for (const auto& b : *bands) {
        if (!(b.is_array() && b.size() == 2 && b[0].is_number() && b[1].is_number())) {
          ok = false;
          break;
        }
        c.tradeoff_bands.push_back({b[0].get<double>(), b[1].get<double>()});
      }
    }
    if (!ok) problems.emplace_back("tradeoff.bands: must be an array of [p_min, p_max] pairs");
  }
  tradeoff.finish();

  Section evaluation(root, "evaluation", problems);
  evaluation.read("raw_prices", c.raw_prices);
  evaluation.finish();

  Section paths(root, "paths", problems);
  std::string traces;
  paths.read("traces", traces);
  if (!traces.empty()) c.traces_path = anchor(base_dir, traces);
  std::string output = "out";
  paths.read("output", output);
  c.output_dir = anchor(base_dir, output);
  paths.finish();

  Section seeds(root, "seeds", problems);
  seeds.read_u64("seed", c.seed);
  seeds.read("n_seeds", c.n_seeds);
  seeds.finish();

  auto semantic = config_violations(c);
  problems.insert(problems.end(), semantic.begin(), semantic.end());
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError({"config file not found: " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace voltmarket::harness
