#include <doctest.h>

#include <cmath>

#include "voltmarket/reward.hpp"
#include "voltmarket/rng.hpp"

using namespace voltmarket;

TEST_CASE("profit term is the price spread") {
  CHECK(reward_r1(0.10, 0.10) == 0.0);
  CHECK(reward_r1(0.15, 0.10) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(reward_r1(0.05, 0.10) == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("mismatch term is symmetric and non-positive") {
  CHECK(reward_r2(100, 100) == 0.0);
  CHECK(reward_r2(120, 100) == -400.0);
  CHECK(reward_r2(100, 120) == -400.0);
}

TEST_CASE("weighted total and projections") {
  CHECK(reward_total(0.05, -400, {1, 1}) == doctest::Approx(-399.95).epsilon(1e-12));
  CHECK(reward_total(0.05, -400, {1, 0}) == 0.05);
  CHECK(reward_total(0.05, -400, {0, 1}) == -400.0);
}

TEST_CASE("energy weighted profit multiplies by demand") {
  RewardConfig cfg;
  cfg.r1_mode = R1Mode::energy_weighted;
  const auto r = compute_reward(0.2, 0.1, 30, 40, cfg);
  CHECK(r.r1 == doctest::Approx(0.1 * 40).epsilon(1e-12));
  CHECK(r.r2 == -100.0);
  CHECK(r.total == doctest::Approx(4.0 - 100.0).epsilon(1e-12));
}

TEST_CASE("r1 mode parsing") {
  CHECK(parse_r1_mode("price_diff") == R1Mode::price_diff);
  CHECK(parse_r1_mode("energy_weighted") == R1Mode::energy_weighted);
  CHECK_FALSE(parse_r1_mode("profit").has_value());
  CHECK(to_string(R1Mode::energy_weighted) == "energy_weighted");
}

TEST_CASE("random tuples against direct arithmetic") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double ps = rng.uniform(0, 1), pp = rng.uniform(0, 1);
    const double R = rng.uniform(0, 200), D = rng.uniform(0, 200);
    RewardConfig cfg{{rng.uniform(0, 2), rng.uniform(0, 2)}, R1Mode::price_diff};
    const auto r = compute_reward(ps, pp, R, D, cfg);
    const double r2 = -std::pow(R - D, 2);
    CHECK(std::abs(r.r1 - (ps - pp)) <= 1e-12);
    CHECK(std::abs(r.r2 - r2) <= 1e-12 * std::max(1.0, std::abs(r2)));
    CHECK(r.r2 <= 0.0);
  }
}
