#include "voltmarket/customers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "voltmarket/errors.hpp"

namespace voltmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

struct SocGrid {
  int levels;
  double step;
  int charge_steps;
  int discharge_steps;
};

SocGrid make_grid(const Battery& battery, int soc_levels) {
  SocGrid g;
  g.levels = soc_levels;
  g.step = battery.capacity / static_cast<double>(soc_levels - 1);
  g.charge_steps = static_cast<int>(std::lround(battery.max_charge_rate / g.step));
  g.discharge_steps = static_cast<int>(std::lround(battery.max_discharge_rate / g.step));
  return g;
}

struct Move {
  BatteryAction action;
  int target;
  Kwh stored;
  Kwh draw;
};

/// Distinct moves from `level`, idle first, then by increasing |stored|.
int moves_from(const SocGrid& g, const Battery& battery, Kwh baseline, int level, std::array<Move, 3>& out) {
  auto make = [&](BatteryAction a, int delta_steps) {
    const int target = std::clamp(level + delta_steps, 0, g.levels - 1);
    const int delta = target - level;
    const Kwh stored = static_cast<double>(delta) * g.step;
    const Kwh exchange = delta > 0 ? stored / battery.charge_efficiency : stored * battery.discharge_efficiency;
    return Move{a, target, stored, std::max(0.0, baseline + exchange)};
  };
  int n = 0;
  out[n++] = make(BatteryAction::idle, 0);
  const Move dis = make(BatteryAction::discharge, -g.discharge_steps);
  const Move chg = make(BatteryAction::charge, g.charge_steps);
  const bool dis_ok = dis.target != level;
  const bool chg_ok = chg.target != level;
  if (dis_ok && chg_ok && std::abs(chg.stored) < std::abs(dis.stored)) {
    out[n++] = chg;
    out[n++] = dis;
  } else {
    if (dis_ok) out[n++] = dis;
    if (chg_ok) out[n++] = chg;
  }
  return n;
}

struct CappedPlan {
  bool feasible = false;
  std::vector<Move> moves;
};

/// Additive DP minimizing sum(price * draw) subject to draw <= cap everywhere.
CappedPlan solve_capped(std::span<const Price> prices, std::span<const Kwh> baseline, const Battery& battery,
                        const SocGrid& g, int start_level, double cap) {
  const std::size_t horizon = prices.size();
  const std::size_t levels = static_cast<std::size_t>(g.levels);
  std::vector<double> next(levels, 0.0);
  std::vector<double> cur(levels);
  std::vector<Move> choice(horizon * levels);
  std::array<Move, 3> moves{};

  for (std::size_t t = horizon; t-- > 0;) {
    for (std::size_t l = 0; l < levels; ++l) {
      double best = kInf;
      const int n = moves_from(g, battery, baseline[t], static_cast<int>(l), moves);
      for (int i = 0; i < n; ++i) {
        const Move& m = moves[i];
        if (m.draw > cap) continue;
        const double v = prices[t] * m.draw + next[static_cast<std::size_t>(m.target)];
        if (v < best) {
          best = v;
          choice[t * levels + l] = m;
        }
      }
      cur[l] = best;
    }
    std::swap(cur, next);
  }

  CappedPlan plan;
  if (!std::isfinite(next[static_cast<std::size_t>(start_level)])) return plan;
  plan.feasible = true;
  plan.moves.reserve(horizon);
  int level = start_level;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Move& m = choice[t * levels + static_cast<std::size_t>(level)];
    plan.moves.push_back(m);
    level = m.target;
  }
  return plan;
}

Schedule to_schedule(const CappedPlan& plan, std::span<const Price> prices, const SocGrid& g, double peak_weight) {
  Schedule s;
  std::vector<Kwh> draws;
  draws.reserve(plan.moves.size());
  for (const auto& m : plan.moves) {
    s.steps.push_back({m.action, m.stored, m.draw, static_cast<double>(m.target) * g.step});
    draws.push_back(m.draw);
  }
  s.cost = customer_cost(draws, prices, peak_weight);
  return s;
}

}  // namespace

void CustomerSpec::collect_violations(const std::string& where, std::vector<std::string>& out) const {
  if (baseline_load.empty()) out.push_back(where + ": baseline_load is empty");
  for (std::size_t i = 0; i < baseline_load.size(); ++i) {
    if (!finite_nonneg(baseline_load[i])) {
      out.push_back(where + ": baseline_load[" + std::to_string(i) + "] must be finite and >= 0");
      break;
    }
  }
  if (!(std::isfinite(reference_price) && reference_price > 0.0))
    out.push_back(where + ": reference_price must be > 0");
  if (!finite_nonneg(peak_weight)) out.push_back(where + ": peak_weight must be >= 0");

  if (kind == CustomerKind::storage) {
    if (!battery) {
      out.push_back(where + ": storage customer requires a battery");
      return;
    }
    const Battery& b = *battery;
    if (!(std::isfinite(b.capacity) && b.capacity > 0.0)) out.push_back(where + ": battery.capacity must be > 0");
    if (!(std::isfinite(b.max_charge_rate) && b.max_charge_rate > 0.0))
      out.push_back(where + ": battery.max_charge_rate must be > 0");
    if (!(std::isfinite(b.max_discharge_rate) && b.max_discharge_rate > 0.0))
      out.push_back(where + ": battery.max_discharge_rate must be > 0");
    if (!(b.charge_efficiency > 0.0 && b.charge_efficiency <= 1.0))
      out.push_back(where + ": battery.charge_efficiency must be in (0, 1]");
    if (!(b.discharge_efficiency > 0.0 && b.discharge_efficiency <= 1.0))
      out.push_back(where + ": battery.discharge_efficiency must be in (0, 1]");
    if (!(std::isfinite(b.soc) && b.soc >= 0.0 && b.soc <= b.capacity))
      out.push_back(where + ": battery.soc must be within [0, capacity]");
    if (soc_levels < 2) out.push_back(where + ": soc_levels must be >= 2");
  } else {
    if (battery) out.push_back(where + ": elastic customer must not have a battery");
    if (!(std::isfinite(elasticity) && elasticity <= 0.0)) out.push_back(where + ": elasticity must be <= 0");
  }
}

Kwh elastic_demand(Kwh baseline, Price price, double elasticity, Price reference_price) {
  if (baseline <= 0.0) return 0.0;
  const Price effective = std::max(price, 0.01 * reference_price);
  const Kwh raw = baseline * std::pow(effective / reference_price, elasticity);
  return std::clamp(raw, 0.2 * baseline, 2.0 * baseline);
}

double customer_cost(std::span<const Kwh> grid_draw, std::span<const Price> prices, double peak_weight) {
  if (grid_draw.empty() || grid_draw.size() != prices.size()) {
    throw std::invalid_argument("customer_cost: draws and prices must have equal non-zero length");
  }
  double energy_cost = 0.0;
  double peak = grid_draw[0];
  for (std::size_t t = 0; t < grid_draw.size(); ++t) {
    energy_cost += prices[t] * grid_draw[t];
    peak = std::max(peak, grid_draw[t]);
  }
  return energy_cost + peak_weight * peak;
}

Schedule dp_schedule(std::span<const Price> price_window, std::span<const Kwh> baseline_window,
                     const Battery& battery, int soc_levels, double peak_weight) {
  if (price_window.empty()) throw RangeError("dp_schedule: empty window");
  if (baseline_window.size() != price_window.size()) {
    throw RangeError("dp_schedule: price and baseline windows differ in length");
  }
  if (soc_levels < 2) throw std::invalid_argument("dp_schedule: soc_levels must be >= 2");

  const SocGrid g = make_grid(battery, soc_levels);
  const int start = std::clamp(static_cast<int>(std::lround(battery.soc / g.step)), 0, g.levels - 1);

  const CappedPlan free_plan = solve_capped(price_window, baseline_window, battery, g, start, kInf);
  Schedule best = to_schedule(free_plan, price_window, g, peak_weight);
  if (peak_weight <= 0.0) return best;

  // Candidate caps are every draw value the moves can produce. Scanning them
  // upward, a cap m can only help while the unconstrained energy cost plus
  // peak_weight * m is still below the best cost found.
  double free_energy = 0.0;
  for (std::size_t t = 0; t < price_window.size(); ++t) free_energy += price_window[t] * free_plan.moves[t].draw;

  std::vector<double> caps;
  std::array<Move, 3> moves{};
  for (std::size_t t = 0; t < price_window.size(); ++t) {
    for (int l = 0; l < g.levels; ++l) {
      const int n = moves_from(g, battery, baseline_window[t], l, moves);
      for (int i = 0; i < n; ++i) caps.push_back(moves[i].draw);
    }
  }
  std::sort(caps.begin(), caps.end());
  caps.erase(std::unique(caps.begin(), caps.end()), caps.end());

  for (double cap : caps) {
    if (free_energy + peak_weight * cap > best.cost) break;
    const CappedPlan plan = solve_capped(price_window, baseline_window, battery, g, start, cap);
    if (!plan.feasible) continue;
    Schedule candidate = to_schedule(plan, price_window, g, peak_weight);
    if (candidate.cost < best.cost) best = std::move(candidate);
  }
  return best;
}

StorageResponse storage_demand(const CustomerSpec& spec, std::span<const Price> price_window,
                               std::span<const Kwh> baseline_window, Kwh soc) {
  if (spec.kind != CustomerKind::storage || !spec.battery) {
    throw std::invalid_argument("storage_demand: customer has no storage");
  }
  Battery battery = *spec.battery;
  battery.soc = soc;
  const Schedule plan = dp_schedule(price_window, baseline_window, battery, spec.soc_levels, spec.peak_weight);
  const ScheduleStep& first = plan.steps.front();
  if (first.action == BatteryAction::idle) return {first.grid_draw, soc};
  return {first.grid_draw, std::clamp(first.soc_after, 0.0, battery.capacity)};
}

std::vector<Kwh> cooperative_adjustment(std::span<const CustomerLoad> loads, Kwh capacity_signal) {
  std::vector<Kwh> out;
  out.reserve(loads.size());
  double total = 0.0;
  double independent = 0.0;
  double cooperative_fixed = 0.0;
  double flexible = 0.0;
  for (const auto& c : loads) {
    out.push_back(c.demand);
    total += c.demand;
    if (c.cooperative) {
      const double flex = std::max(0.0, c.demand - 0.5 * c.baseline);
      flexible += flex;
      cooperative_fixed += c.demand - flex;
    } else {
      independent += c.demand;
    }
  }
  if (total <= capacity_signal || flexible <= 0.0) return out;

  const double remaining = std::max(0.0, capacity_signal - independent);
  const double factor = std::clamp((remaining - cooperative_fixed) / flexible, 0.0, 1.0);
  if (factor >= 1.0) return out;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const auto& c = loads[i];
    if (!c.cooperative) continue;
    const double flex = std::max(0.0, c.demand - 0.5 * c.baseline);
    if (flex <= 0.0) continue;
    const double floor = std::min(c.demand, 0.5 * c.baseline);
    out[i] = std::min(c.demand, std::max(floor, (c.demand - flex) + factor * flex));
  }
  return out;
}

}  // namespace voltmarket
