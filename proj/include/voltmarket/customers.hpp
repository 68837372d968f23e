#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voltmarket/core_model.hpp"

namespace voltmarket {

struct Battery {
  Kwh capacity = 10.0;
  Kwh max_charge_rate = 2.0;     // stored energy per timestep
  Kwh max_discharge_rate = 2.0;  // energy drawn from storage per timestep
  double charge_efficiency = 0.95;
  double discharge_efficiency = 0.95;
  Kwh soc = 5.0;
};

enum class CustomerKind { storage, elastic };

struct CustomerSpec {
  CustomerKind kind = CustomerKind::elastic;
  bool cooperative = false;
  std::vector<Kwh> baseline_load;
  std::optional<Battery> battery;  // storage kind only
  double elasticity = 0.0;         // elastic kind only, <= 0
  Price reference_price = 0.15;
  double peak_weight = 0.0;
  int soc_levels = 11;  // storage kind: SOC grid resolution for the scheduler

  /// Appends human-readable violations, each prefixed with `where`.
  void collect_violations(const std::string& where, std::vector<std::string>& out) const;
};

/// Constant-elasticity response, clamped to [0.2, 2] x baseline. A zero price
/// is lifted to 1% of the reference price before exponentiation.
Kwh elastic_demand(Kwh baseline, Price price, double elasticity, Price reference_price);

/// Sum of price-weighted draws plus peak_weight times the largest draw.
/// Throws std::invalid_argument on length mismatch or empty input.
double customer_cost(std::span<const Kwh> grid_draw, std::span<const Price> prices, double peak_weight);

enum class BatteryAction : int { discharge = -1, idle = 0, charge = 1 };

struct ScheduleStep {
  BatteryAction action = BatteryAction::idle;
  Kwh stored = 0.0;     // signed SOC change: > 0 charging, < 0 discharging
  Kwh grid_draw = 0.0;  // baseline plus battery exchange seen by the grid, >= 0
  Kwh soc_after = 0.0;
};

struct Schedule {
  std::vector<ScheduleStep> steps;
  double cost = 0.0;
};

/// Exact minimum-cost battery plan over the window.
///
/// SOC lives on `soc_levels` uniformly spaced points of [0, capacity]; the
/// starting SOC is snapped to the nearest point. Each step either idles or
/// moves by the charge/discharge rate rounded to whole grid steps, truncated
/// at the SOC bounds. The peak term is handled exactly by solving one
/// additive DP per candidate peak cap and keeping the cheapest true cost.
/// Ties go to the action with the smaller absolute energy.
Schedule dp_schedule(std::span<const Price> price_window, std::span<const Kwh> baseline_window,
                     const Battery& battery, int soc_levels, double peak_weight);

struct StorageResponse {
  Kwh demand = 0.0;
  Kwh new_soc = 0.0;
};

/// Receding-horizon step: plans over the window, executes only the first
/// decision.
StorageResponse storage_demand(const CustomerSpec& spec, std::span<const Price> price_window,
                               std::span<const Kwh> baseline_window, Kwh soc);

struct CustomerLoad {
  Kwh demand = 0.0;
  Kwh baseline = 0.0;
  bool cooperative = false;
};

/// When total demand exceeds the broadcast capacity, cooperative customers
/// shrink the part of their demand above half their baseline by one common
/// factor so that their subtotal approaches the capacity left after the
/// independent customers. Independent customers are returned unchanged.
std::vector<Kwh> cooperative_adjustment(std::span<const CustomerLoad> loads, Kwh capacity_signal);

}  // namespace voltmarket
