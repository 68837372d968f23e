#include "voltmarket/grid_env.hpp"

#include <cmath>
#include <numeric>
#include <span>

#include "voltmarket/errors.hpp"
#include "voltmarket/renewables.hpp"

namespace voltmarket {

std::vector<std::string> Scenario::violations() const {
  std::vector<std::string> out;
  if (customers.empty()) out.emplace_back("scenario: at least one customer is required");
  if (episode_length == 0) out.emplace_back("scenario: episode_length must be > 0");
  if (horizon.p < 0) out.emplace_back("scenario: horizon.p must be >= 0");
  if (horizon.timestep_minutes <= 0) out.emplace_back("scenario: horizon.timestep_minutes must be > 0");
  if (!(std::isfinite(reference_price) && reference_price > 0.0))
    out.emplace_back("scenario: reference_price must be > 0");
  if (traces.weather.size() != traces.purchase_price.size())
    out.emplace_back("scenario: weather and purchase_price traces differ in length");
  if (horizon.p >= 0 && traces.size() < required_length()) {
    out.push_back("scenario: traces cover " + std::to_string(traces.size()) + " steps, need " +
                  std::to_string(required_length()));
  }
  if (!(traces.solar_capacity_kw >= 0.0) || !(traces.wind_capacity_kw >= 0.0))
    out.emplace_back("scenario: renewable capacities must be >= 0");
  for (std::size_t i = 0; i < traces.weather.size(); ++i) {
    const auto& w = traces.weather[i];
    if (!std::isfinite(w.temperature_c) || !(w.solar_irradiance >= 0.0 && w.solar_irradiance <= 1.0) ||
        !(std::isfinite(w.wind_speed) && w.wind_speed >= 0.0)) {
      out.push_back("scenario: weather sample " + std::to_string(i) + " out of range");
      break;
    }
  }
  for (std::size_t i = 0; i < traces.purchase_price.size(); ++i) {
    if (!(std::isfinite(traces.purchase_price[i]) && traces.purchase_price[i] >= 0.0)) {
      out.push_back("scenario: purchase_price " + std::to_string(i) + " must be finite and >= 0");
      break;
    }
  }
  for (std::size_t i = 0; i < customers.size(); ++i) {
    const std::string where = "customer[" + std::to_string(i) + "]";
    customers[i].collect_violations(where, out);
    if (horizon.p >= 0 && customers[i].baseline_load.size() < required_length()) {
      out.push_back(where + ": baseline_load shorter than " + std::to_string(required_length()));
    }
  }
  return out;
}

void Scenario::validate() const {
  auto v = violations();
  if (!v.empty()) throw ValidationError(std::move(v));
}

GridEnv::GridEnv(const Scenario& scenario) : scenario_(scenario) { scenario_.validate(); }

Kwh GridEnv::renewable_at(std::size_t t) const {
  const auto& tr = scenario_.traces;
  return renewable_generation(tr.weather[t], tr.solar_capacity_kw, tr.wind_capacity_kw,
                              scenario_.horizon.timestep_minutes);
}

std::vector<Kwh> GridEnv::customer_response(Price price, bool commit) {
  const std::size_t window = scenario_.horizon.window();
  const std::vector<Price> price_window(window, price);
  std::vector<CustomerLoad> loads;
  loads.reserve(scenario_.customers.size());
  for (std::size_t i = 0; i < scenario_.customers.size(); ++i) {
    const CustomerSpec& c = scenario_.customers[i];
    const Kwh baseline = c.baseline_load[t_];
    Kwh demand = 0.0;
    if (c.kind == CustomerKind::storage) {
      const std::span<const Kwh> baseline_window(c.baseline_load.data() + t_, window);
      const StorageResponse r = storage_demand(c, price_window, baseline_window, soc_[i]);
      demand = r.demand;
      if (commit) soc_[i] = r.new_soc;
    } else {
      demand = elastic_demand(baseline, price, c.elasticity, c.reference_price);
    }
    loads.push_back({demand, baseline, c.cooperative});
  }
  return cooperative_adjustment(loads, renewable_at(t_));
}

StateWindow GridEnv::observe() {
  const auto probe = customer_response(scenario_.reference_price, false);
  const Kwh demand_now = std::accumulate(probe.begin(), probe.end(), 0.0);
  return build_state_window(scenario_.traces, t_, scenario_.horizon, demand_now);
}

StateWindow GridEnv::reset() {
  t_ = 0;
  started_ = true;
  done_ = false;
  soc_.assign(scenario_.customers.size(), 0.0);
  for (std::size_t i = 0; i < scenario_.customers.size(); ++i) {
    const CustomerSpec& c = scenario_.customers[i];
    if (c.kind != CustomerKind::storage) continue;
    // Configured SOC, snapped onto the scheduler's grid.
    const double step = c.battery->capacity / static_cast<double>(c.soc_levels - 1);
    soc_[i] = std::round(c.battery->soc / step) * step;
  }
  return observe();
}

StepOutcome GridEnv::step(const PriceSignal& action) {
  if (!started_) throw LifecycleError("GridEnv::step called before reset");
  if (done_) throw LifecycleError("GridEnv::step called on a finished episode");

  StepOutcome out;
  out.customer_draws = customer_response(action.price, true);
  out.e_demand = std::accumulate(out.customer_draws.begin(), out.customer_draws.end(), 0.0);
  out.e_renewable = renewable_at(t_);
  out.price_sold = action.price;
  out.purchase_price = scenario_.traces.purchase_price[t_];

  ++t_;
  done_ = t_ == scenario_.episode_length;
  out.done = done_;
  out.next_state = observe();
  return out;
}

}  // namespace voltmarket
