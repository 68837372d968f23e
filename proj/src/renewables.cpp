#include "voltmarket/renewables.hpp"

#include <algorithm>

namespace voltmarket {

Kwh renewable_generation(const WeatherSample& weather, double solar_capacity_kw,
                         double wind_capacity_kw, int timestep_minutes) {
  const double ratio = std::max(0.0, weather.wind_speed) / kRatedWindSpeed;
  const double wind_fraction = std::min(1.0, ratio * ratio * ratio);
  const double power_kw = solar_capacity_kw * weather.solar_irradiance + wind_capacity_kw * wind_fraction;
  return power_kw * static_cast<double>(timestep_minutes) / 60.0;
}

}  // namespace voltmarket
