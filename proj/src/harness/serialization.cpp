#include "voltmarket/harness/serialization.hpp"

#include <fstream>
#include <sstream>

#include "voltmarket/errors.hpp"
#include "voltmarket/harness/format.hpp"

namespace voltmarket::harness {

using nlohmann::json;

json policy_to_json(const PolicyFile& policy) {
  const PolicyParams& p = policy.params;
  return json{
      {"schema_version", kPolicySchemaVersion},
      {"horizon", {{"p", policy.horizon.p}, {"timestep_minutes", policy.horizon.timestep_minutes}}},
      {"grid", {{"p_min", policy.grid.p_min}, {"p_max", policy.grid.p_max}, {"levels", policy.grid.levels}}},
      {"scaling", {{"mean", p.scaling.mean}, {"scale", p.scaling.scale}}},
      {"actions", p.actions},
      {"features", p.features},
      {"weights", p.weights},
  };
}

PolicyFile policy_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw FormatError("policy file: missing schema_version");
  }
  const int version = doc["schema_version"].get<int>();
  if (version != kPolicySchemaVersion) throw VersionError(kPolicySchemaVersion, version);
  PolicyFile out;
  try {
    out.horizon.p = doc.at("horizon").at("p").get<int>();
    out.horizon.timestep_minutes = doc.at("horizon").at("timestep_minutes").get<int>();
    out.grid.p_min = doc.at("grid").at("p_min").get<double>();
    out.grid.p_max = doc.at("grid").at("p_max").get<double>();
    out.grid.levels = doc.at("grid").at("levels").get<std::vector<double>>();
    out.params.scaling.mean = doc.at("scaling").at("mean").get<std::vector<double>>();
    out.params.scaling.scale = doc.at("scaling").at("scale").get<std::vector<double>>();
    out.params.actions = doc.at("actions").get<std::size_t>();
    out.params.features = doc.at("features").get<std::size_t>();
    out.params.weights = doc.at("weights").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("policy file: ") + e.what());
  }
  const PolicyParams& p = out.params;
  if (p.weights.size() != p.actions * p.features || p.actions != out.grid.size() ||
      p.features != feature_count(out.horizon) || p.scaling.mean.size() != raw_feature_count(out.horizon) ||
      p.scaling.scale.size() != p.scaling.mean.size()) {
    throw FormatError("policy file: inconsistent dimensions");
  }
  return out;
}

PolicyFile parse_policy(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("policy file is corrupt: ") + e.what());
  }
  return policy_from_json(doc);
}

void persist_policy(const PolicyFile& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write policy file: " + path.string());
  out << policy_to_json(policy).dump(2) << '\n';
}

PolicyFile load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open policy file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_policy(buf.str());
}

json scenario_to_json(const Scenario& s) {
  json customers = json::array();
  for (const auto& c : s.customers) {
    json jc{{"kind", c.kind == CustomerKind::storage ? "storage" : "elastic"},
            {"cooperative", c.cooperative},
            {"elasticity", c.elasticity},
            {"reference_price", c.reference_price},
            {"peak_weight", c.peak_weight},
            {"soc_levels", c.soc_levels},
            {"baseline_load", c.baseline_load}};
    if (c.battery) {
      const Battery& b = *c.battery;
      jc["battery"] = {{"capacity", b.capacity},
                       {"max_charge_rate", b.max_charge_rate},
                       {"max_discharge_rate", b.max_discharge_rate},
                       {"charge_efficiency", b.charge_efficiency},
                       {"discharge_efficiency", b.discharge_efficiency},
                       {"soc", b.soc}};
    } else {
      jc["battery"] = nullptr;
    }
    customers.push_back(std::move(jc));
  }
  std::vector<double> temp, irr, wind;
  for (const auto& w : s.traces.weather) {
    temp.push_back(w.temperature_c);
    irr.push_back(w.solar_irradiance);
    wind.push_back(w.wind_speed);
  }
  return json{{"seed", s.seed},
              {"episode_length", s.episode_length},
              {"reference_price", s.reference_price},
              {"horizon", {{"p", s.horizon.p}, {"timestep_minutes", s.horizon.timestep_minutes}}},
              {"traces",
               {{"solar_capacity_kw", s.traces.solar_capacity_kw},
                {"wind_capacity_kw", s.traces.wind_capacity_kw},
                {"start_minute", s.traces.start_minute},
                {"temperature_c", temp},
                {"solar_irradiance", irr},
                {"wind_speed_ms", wind},
                {"purchase_price", s.traces.purchase_price}}},
              {"customers", customers}};
}

Scenario scenario_from_json(const json& doc) {
  Scenario s;
  try {
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.episode_length = doc.at("episode_length").get<std::size_t>();
    s.reference_price = doc.at("reference_price").get<double>();
    s.horizon.p = doc.at("horizon").at("p").get<int>();
    s.horizon.timestep_minutes = doc.at("horizon").at("timestep_minutes").get<int>();
    const json& tr = doc.at("traces");
    s.traces.solar_capacity_kw = tr.at("solar_capacity_kw").get<double>();
    s.traces.wind_capacity_kw = tr.at("wind_capacity_kw").get<double>();
    s.traces.start_minute = tr.at("start_minute").get<std::int64_t>();
    const auto temp = tr.at("temperature_c").get<std::vector<double>>();
    const auto irr = tr.at("solar_irradiance").get<std::vector<double>>();
    const auto wind = tr.at("wind_speed_ms").get<std::vector<double>>();
    s.traces.purchase_price = tr.at("purchase_price").get<std::vector<double>>();
    if (temp.size() != irr.size() || temp.size() != wind.size()) throw FormatError("scenario: ragged weather arrays");
    for (std::size_t i = 0; i < temp.size(); ++i) s.traces.weather.push_back({temp[i], irr[i], wind[i]});
    for (const auto& jc : doc.at("customers")) {
      CustomerSpec c;
      c.kind = jc.at("kind").get<std::string>() == "storage" ? CustomerKind::storage : CustomerKind::elastic;
      c.cooperative = jc.at("cooperative").get<bool>();
      c.elasticity = jc.at("elasticity").get<double>();
      c.reference_price = jc.at("reference_price").get<double>();
      c.peak_weight = jc.at("peak_weight").get<double>();
      c.soc_levels = jc.at("soc_levels").get<int>();
      c.baseline_load = jc.at("baseline_load").get<std::vector<double>>();
      if (!jc.at("battery").is_null()) {
        const json& jb = jc.at("battery");
        c.battery = Battery{jb.at("capacity").get<double>(),          jb.at("max_charge_rate").get<double>(),
                            jb.at("max_discharge_rate").get<double>(), jb.at("charge_efficiency").get<double>(),
                            jb.at("discharge_efficiency").get<double>(), jb.at("soc").get<double>()};
      }
      s.customers.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
  return s;
}

json pool_to_json(const std::vector<Scenario>& training, const std::vector<Scenario>& heldout,
                  std::uint64_t base_seed, std::uint64_t heldout_base_seed) {
  json tr = json::array();
  for (const auto& s : training) tr.push_back(scenario_to_json(s));
  json ho = json::array();
  for (const auto& s : heldout) ho.push_back(scenario_to_json(s));
  return json{{"schema_version", kPoolSchemaVersion},
              {"base_seed", base_seed},
              {"heldout_base_seed", heldout_base_seed},
              {"training", tr},
              {"heldout", ho}};
}

std::string episode_csv(const EpisodeRecord& episode) {
  std::string out = "t,price,e_demand,e_renewable,purchase_price,r1,r2,total\n";
  for (const auto& s : episode.steps) {
    out += std::to_string(s.t) + ',' + format_double(s.price) + ',' + format_double(s.e_demand) + ',' +
           format_double(s.e_renewable) + ',' + format_double(s.purchase_price) + ',' + format_double(s.r1) + ',' +
           format_double(s.r2) + ',' + format_double(s.total) + '\n';
  }
  return out;
}

json summary_to_json(const ViolationSummary& s) {
  return json{{"count", s.count},
              {"max_abs", s.max_abs},
              {"sum_abs", s.sum_abs},
              {"lower_count", s.lower_count},
              {"upper_count", s.upper_count}};
}

json violations_to_json(const ViolationLog& log) {
  json entries = json::array();
  for (const auto& v : log.entries) {
    entries.push_back({{"t", v.t},
                       {"attempted_price", v.attempted},
                       {"bound_hit", v.bound == Bound::lower ? "lower" : "upper"},
                       {"clamped_price", v.clamped}});
  }
  return json{{"summary", summary_to_json(summarize_violations(log))}, {"entries", entries}};
}

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
  std::string out = "p_min,p_max,mean_return,mean_sum_r1,mean_sum_r2\n";
  for (const auto& r : rows) {
    out += format_double(r.level.p_min) + ',' + format_double(r.level.p_max) + ',' + format_double(r.mean_return) +
           ',' + format_double(r.mean_sum_r1) + ',' + format_double(r.mean_sum_r2) + '\n';
  }
  return out;
}

json sample_efficiency_to_json(const SampleEfficiencyReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"scenario", e.scenario},
                       {"scenario_seed", e.scenario_seed},
                       {"seed_index", e.seed_index},
                       {"seed", e.seed},
                       {"meta_return", e.meta_return},
                       {"baseline_return", e.baseline_return},
                       {"meta_curve", e.meta_curve},
                       {"baseline_curve", e.baseline_curve}});
  }
  json scenarios = json::array();
  for (const auto& s : r.scenarios) {
    scenarios.push_back({{"scenario", s.scenario},
                         {"scenario_seed", s.scenario_seed},
                         {"meta_mean", s.meta_mean},
                         {"baseline_mean", s.baseline_mean},
                         {"meta_wins", s.meta_wins},
                         {"meta_curve", s.meta_curve},
                         {"baseline_curve", s.baseline_curve}});
  }
  return json{{"k_steps", r.k_steps},
              {"n_seeds", r.n_seeds},
              {"checkpoints", r.checkpoints},
              {"pooled_meta_mean", r.pooled_meta_mean},
              {"pooled_baseline_mean", r.pooled_baseline_mean},
              {"entry_meta_wins", r.entry_meta_wins},
              {"entry_baseline_wins", r.entry_baseline_wins},
              {"entry_ties", r.entry_ties},
              {"scenario_meta_wins", r.scenario_meta_wins},
              {"scenarios", scenarios},
              {"entries", entries}};
}

std::string sample_efficiency_csv(const SampleEfficiencyReport& r) {
  std::string out = "scenario,scenario_seed,seed_index,seed,meta_return,baseline_return\n";
  for (const auto& e : r.entries) {
    out += std::to_string(e.scenario) + ',' + std::to_string(e.scenario_seed) + ',' + std::to_string(e.seed_index) +
           ',' + std::to_string(e.seed) + ',' + format_double(e.meta_return) + ',' + format_double(e.baseline_return) +
           '\n';
  }
  return out;
}

}  // namespace voltmarket::harness
