#pragma once

#include <filesystem>
#include <string>

#include "voltmarket/core_model.hpp"

namespace voltmarket::harness {

/// Required header of trace files, exact column names and order.
inline constexpr const char* kTraceHeader = "timestamp_min,temperature_c,solar_irradiance,wind_speed_ms,purchase_price";

/// Parses a trace CSV. Timestamps must advance by exactly `timestep_minutes`.
/// Errors carry the 1-based line number and, for range violations, the
/// column name. Capacities are left at zero for the caller to fill in.
ScenarioTraces ingest_traces(const std::filesystem::path& csv_path, int timestep_minutes);
ScenarioTraces parse_traces(const std::string& text, int timestep_minutes);

std::string format_traces(const ScenarioTraces& traces, int timestep_minutes);

}  // namespace voltmarket::harness
