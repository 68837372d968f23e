#pragma once

#include <cstdint>
#include <vector>

#include "voltmarket/grid_env.hpp"

namespace voltmarket {

struct SweepRange {
  double lo = 0.0;
  double hi = 0.0;

  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Sweep ranges and fixed knobs for synthesizing a pool of scenarios.
struct PoolConfig {
  std::size_t count = 8;
  SweepRange storage_fraction{0.0, 1.0};
  SweepRange cooperative_fraction{0.0, 0.5};
  SweepRange elasticity{-0.8, -0.3};
  SweepRange customer_count{4.0, 10.0};

  Horizon horizon{3, 60};
  std::size_t episode_length = 168;
  Price reference_price = 0.15;
  int soc_levels = 11;
  double peak_weight = 0.05;
  /// Scales renewable nameplate capacity relative to the scenario's mean load.
  double renewable_ratio = 1.0;

  std::vector<std::string> violations() const;
};

/// Value of stratum `index` out of `count` equal strata of the range.
double stratum_midpoint(const SweepRange& range, std::size_t index, std::size_t count);

/// Latin-hypercube design over the four sweep dimensions: each dimension
/// takes every stratum midpoint exactly once, with strata paired across
/// dimensions by seeded permutations. Scenario i gets seed base_seed + i and
/// synthetic traces drawn from that seed. Throws ValidationError on an empty
/// range or zero count.
std::vector<Scenario> build_scenario_pool(const PoolConfig& config, std::uint64_t base_seed);

/// The design point of scenario i before trace synthesis; exposed for
/// reporting and tests.
struct PoolDesignPoint {
  double storage_fraction = 0.0;
  double cooperative_fraction = 0.0;
  double elasticity = 0.0;
  std::size_t customer_count = 0;
};

std::vector<PoolDesignPoint> pool_design(const PoolConfig& config, std::uint64_t base_seed);

/// Synthesizes one scenario for the given design point.
Scenario synthesize_scenario(const PoolConfig& config, const PoolDesignPoint& point, std::uint64_t seed);

}  // namespace voltmarket
