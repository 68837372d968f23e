#include "voltmarket/harness/traces_csv.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "voltmarket/errors.hpp"
#include "voltmarket/harness/format.hpp"

namespace voltmarket::harness {

namespace {

constexpr std::array<const char*, 5> kColumns = {"timestamp_min", "temperature_c", "solar_irradiance",
                                                 "wind_speed_ms", "purchase_price"};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw FormatError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

ScenarioTraces parse_traces(const std::string& text, int timestep_minutes) {
  std::istringstream in(text);
  std::string row;
  std::size_t line = 0;
  ScenarioTraces traces;
  bool header_seen = false;
  double prev_ts = 0.0;

  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (!header_seen) {
      if (row != kTraceHeader) fail(line, std::string("expected header '") + kTraceHeader + "'");
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;

    std::array<double, 5> v{};
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      const std::string_view cell(row.data() + start, (comma == std::string::npos ? row.size() : comma) - start);
      if (field >= v.size()) fail(line, "too many fields (expected 5)");
      const auto parsed = parse_double(cell);
      if (!parsed || !std::isfinite(*parsed)) fail(line, std::string("malformed value in column ") + kColumns[field]);
      v[field++] = *parsed;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != v.size()) fail(line, "expected 5 fields, found " + std::to_string(field));

    const auto [ts, temp, irr, wind, price] = v;
    if (ts < 0.0 || ts != std::floor(ts)) fail(line, "timestamp_min must be a non-negative integer");
    if (traces.size() == 0) {
      traces.start_minute = static_cast<std::int64_t>(ts);
    } else if (ts - prev_ts != static_cast<double>(timestep_minutes)) {
      fail(line, "timestamp_min must advance by " + std::to_string(timestep_minutes) + " minutes");
    }
    prev_ts = ts;
    if (!(irr >= 0.0 && irr <= 1.0)) fail(line, "solar_irradiance out of range [0, 1]");
    if (wind < 0.0) fail(line, "wind_speed_ms must be >= 0");
    if (price < 0.0) fail(line, "purchase_price must be >= 0");
    traces.weather.push_back({temp, irr, wind});
    traces.purchase_price.push_back(price);
  }
  if (!header_seen) fail(1, "empty file");
  return traces;
}

ScenarioTraces ingest_traces(const std::filesystem::path& csv_path, int timestep_minutes) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw FormatError("cannot open trace file: " + csv_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_traces(buf.str(), timestep_minutes);
  } catch (const FormatError& e) {
    throw FormatError(csv_path.string() + ": " + e.what());
  }
}

std::string format_traces(const ScenarioTraces& traces, int timestep_minutes) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& w = traces.weather[i];
    out += std::to_string(traces.start_minute + static_cast<std::int64_t>(i) * timestep_minutes);
    out += ',' + format_double(w.temperature_c) + ',' + format_double(w.solar_irradiance) + ',' +
           format_double(w.wind_speed) + ',' + format_double(traces.purchase_price[i]) + '\n';
  }
  return out;
}

}  // namespace voltmarket::harness
