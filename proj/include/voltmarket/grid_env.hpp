#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voltmarket/core_model.hpp"
#include "voltmarket/customers.hpp"

namespace voltmarket {

/// One reproducible simulation environment.
struct Scenario {
  std::vector<CustomerSpec> customers;
  ScenarioTraces traces;
  Horizon horizon;
  std::size_t episode_length = 168;
  std::uint64_t seed = 0;
  /// Price at which customers consume their baseline; used to probe the
  /// momentary demand and as the fixed-price reference policy.
  Price reference_price = 0.15;

  /// Every trace and customer baseline must cover `required_length()` steps.
  std::size_t required_length() const { return episode_length + horizon.window(); }

  std::vector<std::string> violations() const;
  /// Throws ValidationError listing all violations.
  void validate() const;
};

struct StepOutcome {
  StateWindow next_state;
  Kwh e_demand = 0.0;
  Kwh e_renewable = 0.0;
  Price price_sold = 0.0;
  Price purchase_price = 0.0;
  bool done = false;
  /// Post-adjustment grid draw of every customer, in scenario order.
  std::vector<Kwh> customer_draws;
};

/// Step/reset simulation over one scenario.
///
/// The environment holds a reference to the scenario, which must outlive it.
/// A single instance is not thread-safe; separate instances share nothing.
class GridEnv {
 public:
  /// Validates the scenario; throws ValidationError.
  explicit GridEnv(const Scenario& scenario);

  StateWindow reset();
  /// Throws LifecycleError when called before reset() or after done.
  StepOutcome step(const PriceSignal& action);

  std::size_t t() const { return t_; }
  bool done() const { return done_; }
  const Scenario& scenario() const { return scenario_; }
  /// Current state of charge per customer (0 for elastic customers).
  const std::vector<Kwh>& soc() const { return soc_; }

 private:
  /// Demand of every customer at time t_ against a constant announced price,
  /// after cooperative adjustment. Commits SOC changes only when `commit`.
  std::vector<Kwh> customer_response(Price price, bool commit);
  Kwh renewable_at(std::size_t t) const;
  StateWindow observe();

  const Scenario& scenario_;
  std::vector<Kwh> soc_;
  std::size_t t_ = 0;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace voltmarket
