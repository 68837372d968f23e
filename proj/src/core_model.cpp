#include "voltmarket/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "voltmarket/errors.hpp"
#include "voltmarket/renewables.hpp"

namespace voltmarket {

namespace {
constexpr std::int64_t kMinutesPerDay = 1440;
}

bool StateWindow::well_formed() const {
  const auto n = demand.size();
  return n > 0 && renewable.size() == n && purchase_price.size() == n && weather.size() == n &&
         temporal.size() == n;
}

TemporalFeatures encode_temporal(std::int64_t timestamp_minutes) {
  const std::int64_t ts = std::max<std::int64_t>(0, timestamp_minutes);
  const std::int64_t minute_of_day = ts % kMinutesPerDay;
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(minute_of_day) / kMinutesPerDay;
  TemporalFeatures out;
  out.hour_sin = std::sin(theta);
  out.hour_cos = std::cos(theta);
  out.day_of_week = static_cast<int>((ts / kMinutesPerDay) % 7);
  return out;
}

StateWindow build_state_window(const ScenarioTraces& traces, std::size_t t, const Horizon& horizon,
                               Kwh demand_now) {
  const std::size_t n = horizon.window();
  if (horizon.p < 0 || t + n > traces.size() || traces.purchase_price.size() < traces.size()) {
    throw RangeError("state window [" + std::to_string(t) + ", " + std::to_string(t + n - 1) +
                     "] exceeds trace length " + std::to_string(traces.size()));
  }
  StateWindow s;
  s.t = t;
  s.demand.assign(n, demand_now);
  s.renewable.reserve(n);
  s.purchase_price.reserve(n);
  s.weather.reserve(n);
  s.temporal.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& w = traces.weather[t + k];
    s.renewable.push_back(
        renewable_generation(w, traces.solar_capacity_kw, traces.wind_capacity_kw, horizon.timestep_minutes));
    s.purchase_price.push_back(traces.purchase_price[t + k]);
    s.weather.push_back(w);
    s.temporal.push_back(
        encode_temporal(traces.start_minute + static_cast<std::int64_t>(t + k) * horizon.timestep_minutes));
  }
  return s;
}

}  // namespace voltmarket
