#include "voltmarket/scenario_pool.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "voltmarket/errors.hpp"
#include "voltmarket/rng.hpp"

namespace voltmarket {

namespace {

bool valid_range(const SweepRange& r) { return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi; }

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
  return p;
}

double bump(double hour, double center, double width) {
  const double d = hour - center;
  return std::exp(-d * d / width);
}

// Residential-style profile: low overnight, morning shoulder, evening peak.
double load_shape(double hour) { return 0.6 + 0.5 * bump(hour, 8.0, 3.0) + 1.0 * bump(hour, 19.0, 6.0); }

}  // namespace

std::vector<std::string> PoolConfig::violations() const {
  std::vector<std::string> out;
  if (count == 0) out.emplace_back("pool.count must be > 0");
  auto check = [&](const SweepRange& r, const char* name) {
    if (!valid_range(r)) out.push_back(std::string("pool.") + name + " is an empty range (lo > hi)");
  };
  check(storage_fraction, "storage_fraction");
  check(cooperative_fraction, "cooperative_fraction");
  check(elasticity, "elasticity");
  check(customer_count, "customer_count");
  if (valid_range(storage_fraction) && (storage_fraction.lo < 0.0 || storage_fraction.hi > 1.0))
    out.emplace_back("pool.storage_fraction must lie within [0, 1]");
  if (valid_range(cooperative_fraction) && (cooperative_fraction.lo < 0.0 || cooperative_fraction.hi > 1.0))
    out.emplace_back("pool.cooperative_fraction must lie within [0, 1]");
  if (valid_range(elasticity) && elasticity.hi > 0.0) out.emplace_back("pool.elasticity must be <= 0");
  if (valid_range(customer_count) && customer_count.lo < 1.0) out.emplace_back("pool.customer_count must be >= 1");
  if (horizon.p < 0) out.emplace_back("horizon.p must be >= 0");
  if (horizon.timestep_minutes <= 0) out.emplace_back("horizon.timestep_minutes must be > 0");
  if (episode_length == 0) out.emplace_back("pool.episode_length must be > 0");
  if (!(reference_price > 0.0)) out.emplace_back("pool.reference_price must be > 0");
  if (soc_levels < 2) out.emplace_back("pool.soc_levels must be >= 2");
  if (!(peak_weight >= 0.0)) out.emplace_back("pool.peak_weight must be >= 0");
  if (!(renewable_ratio >= 0.0)) out.emplace_back("pool.renewable_ratio must be >= 0");
  return out;
}

double stratum_midpoint(const SweepRange& range, std::size_t index, std::size_t count) {
  const double u = (static_cast<double>(index) + 0.5) / static_cast<double>(count);
  return range.lo + (range.hi - range.lo) * u;
}

std::vector<PoolDesignPoint> pool_design(const PoolConfig& config, std::uint64_t base_seed) {
  if (auto v = config.violations(); !v.empty()) throw ValidationError(std::move(v));
  const std::size_t n = config.count;
  std::vector<std::vector<std::size_t>> strata;
  for (std::uint64_t dim = 0; dim < 4; ++dim) {
    Rng rng(derive_seed(base_seed, 0x5eed, dim));
    strata.push_back(permutation(n, rng));
  }
  std::vector<PoolDesignPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].storage_fraction = stratum_midpoint(config.storage_fraction, strata[0][i], n);
    out[i].cooperative_fraction = stratum_midpoint(config.cooperative_fraction, strata[1][i], n);
    out[i].elasticity = stratum_midpoint(config.elasticity, strata[2][i], n);
    const double customers = stratum_midpoint(config.customer_count, strata[3][i], n);
    out[i].customer_count = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(customers)));
  }
  return out;
}

Scenario synthesize_scenario(const PoolConfig& config, const PoolDesignPoint& point, std::uint64_t seed) {
  Rng rng(seed);
  Scenario s;
  s.horizon = config.horizon;
  s.episode_length = config.episode_length;
  s.seed = seed;
  s.reference_price = config.reference_price;

  const std::size_t length = s.required_length();
  const double hours_per_step = static_cast<double>(config.horizon.timestep_minutes) / 60.0;
  auto hour_of = [&](std::size_t i) { return std::fmod(static_cast<double>(i) * hours_per_step, 24.0); };
  auto day_of = [&](std::size_t i) { return static_cast<std::size_t>(static_cast<double>(i) * hours_per_step / 24.0); };

  // Weather and wholesale price.
  const std::size_t days = day_of(length) + 1;
  std::vector<double> clearness(days);
  for (auto& c : clearness) c = rng.uniform(0.6, 1.0);
  double wind = 5.5;
  s.traces.weather.reserve(length);
  s.traces.purchase_price.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double hour = hour_of(i);
    WeatherSample w;
    const double sun = std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
    w.solar_irradiance = std::clamp(std::max(0.0, sun) * clearness[day_of(i)], 0.0, 1.0);
    w.temperature_c = 12.0 + 6.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) + rng.normal();
    wind = std::clamp(5.5 + 0.85 * (wind - 5.5) + 1.2 * rng.normal(), 0.0, 25.0);
    w.wind_speed = wind;
    s.traces.weather.push_back(w);
    const double price = 0.08 + 0.05 * bump(hour, 19.0, 8.0) + 0.02 * bump(hour, 8.0, 4.0) + 0.003 * rng.normal();
    s.traces.purchase_price.push_back(std::max(0.01, price));
  }

  // Customers.
  const std::size_t n = point.customer_count;
  const auto storage_count = static_cast<std::size_t>(std::lround(point.storage_fraction * static_cast<double>(n)));
  const auto coop_count = static_cast<std::size_t>(std::lround(point.cooperative_fraction * static_cast<double>(n)));
  const auto storage_order = permutation(n, rng);
  const auto coop_order = permutation(n, rng);
  s.customers.resize(n);
  std::vector<double> scales(n);
  double mean_load = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    CustomerSpec& c = s.customers[k];
    const double scale = rng.uniform(0.8, 1.6);
    scales[k] = scale;
    c.baseline_load.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
      const double noise = std::max(0.0, 1.0 + 0.05 * rng.normal());
      c.baseline_load.push_back(scale * load_shape(hour_of(i)) * hours_per_step * noise);
    }
    mean_load += std::accumulate(c.baseline_load.begin(), c.baseline_load.end(), 0.0) / static_cast<double>(length);
    c.reference_price = config.reference_price;
    c.peak_weight = config.peak_weight;
    c.soc_levels = config.soc_levels;
    c.elasticity = std::min(0.0, point.elasticity * rng.uniform(0.9, 1.1));
  }
  for (std::size_t k = 0; k < storage_count; ++k) {
    CustomerSpec& c = s.customers[storage_order[k]];
    c.kind = CustomerKind::storage;
    c.elasticity = 0.0;
    Battery b;
    // Roughly four hours of this customer's average consumption.
    b.capacity = 4.0 * scales[storage_order[k]];
    b.max_charge_rate = 0.2 * b.capacity * hours_per_step;
    b.max_discharge_rate = 0.2 * b.capacity * hours_per_step;
    b.charge_efficiency = 0.95;
    b.discharge_efficiency = 0.95;
    b.soc = 0.5 * b.capacity;
    c.battery = b;
  }
  for (std::size_t k = 0; k < coop_count; ++k) s.customers[coop_order[k]].cooperative = true;

  // Nameplate sized so that renewables roughly cover the mean load over a day.
  const double mean_power_kw = mean_load / hours_per_step;
  s.traces.solar_capacity_kw = config.renewable_ratio * 2.8 * mean_power_kw;
  s.traces.wind_capacity_kw = config.renewable_ratio * 1.2 * mean_power_kw;
  return s;
}

std::vector<Scenario> build_scenario_pool(const PoolConfig& config, std::uint64_t base_seed) {
  const auto design = pool_design(config, base_seed);
  std::vector<Scenario> pool;
  pool.reserve(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) pool.push_back(synthesize_scenario(config, design[i], base_seed + i));
  return pool;
}

}  // namespace voltmarket
