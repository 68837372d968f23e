#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace voltmarket {

/// Energy per timestep, kWh.
using Kwh = double;
/// Currency units per kWh.
using Price = double;

/// Lookahead configuration. Every observation channel has `window()` entries.
struct Horizon {
  int p = 0;
  int timestep_minutes = 60;

  std::size_t window() const { return static_cast<std::size_t>(p) + 1; }
};

struct WeatherSample {
  double temperature_c = 0.0;
  double solar_irradiance = 0.0;  // normalized to [0, 1]
  double wind_speed = 0.0;        // m/s
};

struct TemporalFeatures {
  double hour_sin = 0.0;
  double hour_cos = 1.0;
  int day_of_week = 0;  // 0 = Monday
};

/// Exogenous per-timestep inputs of one scenario. Index i covers the interval
/// starting at minute start_minute + i * timestep_minutes after the Monday
/// 00:00 epoch.
struct ScenarioTraces {
  std::vector<WeatherSample> weather;
  std::vector<Price> purchase_price;
  double solar_capacity_kw = 0.0;
  double wind_capacity_kw = 0.0;
  std::int64_t start_minute = 0;

  std::size_t size() const { return weather.size(); }
};

/// Agent observation at timestep t. Index 0 of every channel is the momentary
/// value, indices 1..p look ahead.
struct StateWindow {
  std::vector<Kwh> demand;
  std::vector<Kwh> renewable;
  std::vector<Price> purchase_price;
  std::vector<WeatherSample> weather;
  std::vector<TemporalFeatures> temporal;
  std::size_t t = 0;

  std::size_t length() const { return demand.size(); }
  bool well_formed() const;
};

/// Scalar retail price announced for one timestep.
struct PriceSignal {
  Price price = 0.0;
  std::size_t level_index = 0;
  bool clamped = false;
};

/// Hour-of-day angle on the unit circle plus day of week. Negative timestamps
/// are treated as 0.
TemporalFeatures encode_temporal(std::int64_t timestamp_minutes);

/// Builds s_t from the traces. Future demand entries repeat `demand_now`;
/// renewable, price, weather and time channels read the traces directly.
/// Throws RangeError when t + p runs past the end of the traces.
StateWindow build_state_window(const ScenarioTraces& traces, std::size_t t, const Horizon& horizon,
                               Kwh demand_now);

}  // namespace voltmarket
