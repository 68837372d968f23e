#pragma once

#include <optional>
#include <string_view>

#include "voltmarket/core_model.hpp"

namespace voltmarket {

struct RewardWeights {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
};

/// `price_diff` uses the per-kWh margin; `energy_weighted` multiplies it by
/// the delivered energy.
enum class R1Mode { price_diff, energy_weighted };

std::optional<R1Mode> parse_r1_mode(std::string_view text);
std::string_view to_string(R1Mode mode);

struct RewardConfig {
  RewardWeights weights;
  R1Mode r1_mode = R1Mode::price_diff;
};

struct RewardBreakdown {
  double r1 = 0.0;
  double r2 = 0.0;
  double total = 0.0;
};

/// Profit margin of the utility.
inline double reward_r1(Price price_sold, Price price_purchased) { return price_sold - price_purchased; }

/// Negative squared supply-demand mismatch; never positive.
inline double reward_r2(Kwh e_renewable, Kwh e_demand) {
  const double gap = e_renewable - e_demand;
  return -(gap * gap);
}

inline double reward_total(double r1, double r2, const RewardWeights& w) { return w.alpha1 * r1 + w.alpha2 * r2; }

RewardBreakdown compute_reward(Price price_sold, Price price_purchased, Kwh e_renewable, Kwh e_demand,
                               const RewardConfig& config);

}  // namespace voltmarket
