#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "voltmarket/meta_learn.hpp"
#include "voltmarket/scenario_pool.hpp"
#include "voltmarket/telemetry.hpp"
#include "voltmarket/training.hpp"

namespace voltmarket::harness {

inline constexpr int kPolicySchemaVersion = 1;
inline constexpr int kPoolSchemaVersion = 1;

struct PolicyFile {
  PolicyParams params;
  PriceGrid grid;
  Horizon horizon;
};

nlohmann::json policy_to_json(const PolicyFile& policy);
/// Throws VersionError for another schema_version and FormatError for a
/// malformed or inconsistent document.
PolicyFile policy_from_json(const nlohmann::json& doc);

void persist_policy(const PolicyFile& policy, const std::filesystem::path& path);
PolicyFile load_policy(const std::filesystem::path& path);
/// Parses policy text; FormatError on truncated or corrupt input.
PolicyFile parse_policy(const std::string& text);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

nlohmann::json pool_to_json(const std::vector<Scenario>& training, const std::vector<Scenario>& heldout,
                            std::uint64_t base_seed, std::uint64_t heldout_base_seed);

/// Per-step CSV: t,price,e_demand,e_renewable,purchase_price,r1,r2,total.
std::string episode_csv(const EpisodeRecord& episode);

nlohmann::json violations_to_json(const ViolationLog& log);
nlohmann::json summary_to_json(const ViolationSummary& summary);

/// p_min,p_max,mean_return,mean_sum_r1,mean_sum_r2.
std::string tradeoff_csv(const std::vector<TradeoffRow>& rows);

nlohmann::json sample_efficiency_to_json(const SampleEfficiencyReport& report);
/// One row per (scenario, seed) entry.
std::string sample_efficiency_csv(const SampleEfficiencyReport& report);

}  // namespace voltmarket::harness
