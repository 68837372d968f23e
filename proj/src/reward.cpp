#include "voltmarket/reward.hpp"

namespace voltmarket {

std::optional<R1Mode> parse_r1_mode(std::string_view text) {
  if (text == "price_diff") return R1Mode::price_diff;
  if (text == "energy_weighted") return R1Mode::energy_weighted;
  return std::nullopt;
}

std::string_view to_string(R1Mode mode) {
  return mode == R1Mode::price_diff ? "price_diff" : "energy_weighted";
}

RewardBreakdown compute_reward(Price price_sold, Price price_purchased, Kwh e_renewable, Kwh e_demand,
                               const RewardConfig& config) {
  RewardBreakdown out;
  out.r1 = reward_r1(price_sold, price_purchased);
  if (config.r1_mode == R1Mode::energy_weighted) out.r1 *= e_demand;
  out.r2 = reward_r2(e_renewable, e_demand);
  out.total = reward_total(out.r1, out.r2, config.weights);
  return out;
}

}  // namespace voltmarket
