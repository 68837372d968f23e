#pragma once

#include "voltmarket/core_model.hpp"

namespace voltmarket {

/// Rated wind speed of the cubic power curve, m/s.
inline constexpr double kRatedWindSpeed = 12.0;

/// Energy delivered over one timestep by linear solar plus a cubic wind power
/// curve capped at rated speed.
Kwh renewable_generation(const WeatherSample& weather, double solar_capacity_kw,
                         double wind_capacity_kw, int timestep_minutes);

}  // namespace voltmarket
