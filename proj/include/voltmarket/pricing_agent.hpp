#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "voltmarket/core_model.hpp"
#include "voltmarket/rng.hpp"

namespace voltmarket {

/// Discrete set of admissible retail prices inside [p_min, p_max].
struct PriceGrid {
  std::vector<Price> levels;
  Price p_min = 0.0;
  Price p_max = 0.0;

  /// K levels evenly spaced over the band, endpoints included. A degenerate
  /// band (p_min == p_max) collapses to a single level.
  static PriceGrid uniform(Price p_min, Price p_max, std::size_t k);

  std::size_t size() const { return levels.size(); }
  std::vector<std::string> violations() const;
};

struct FeatureScaling {
  std::vector<double> mean;
  std::vector<double> scale;
  bool operator==(const FeatureScaling&) const = default;
};

/// Linear action values: one weight row per price level.
struct PolicyParams {
  std::size_t actions = 0;
  std::size_t features = 0;
  std::vector<double> weights;  // row-major, actions x features
  FeatureScaling scaling;

  static PolicyParams zeros(std::size_t actions, std::size_t features);

  std::span<double> row(std::size_t a) { return {weights.data() + a * features, features}; }
  std::span<const double> row(std::size_t a) const { return {weights.data() + a * features, features}; }

  bool operator==(const PolicyParams&) const = default;
};

struct Transition {
  std::vector<double> features;
  std::size_t action_index = 0;
  double reward = 0.0;
  std::vector<double> next_features;
  bool done = false;
};

/// Unscaled per-window channels: demand, renewable, purchase price,
/// temperature, irradiance, wind, hour sin, hour cos.
inline constexpr std::size_t kChannels = 8;

inline std::size_t raw_feature_count(const Horizon& h) { return kChannels * h.window(); }
/// Scaled channels plus the constant bias feature.
inline std::size_t feature_count(const Horizon& h) { return raw_feature_count(h) + 1; }

/// Channel-major flattening of the window.
std::vector<double> flatten_state(const StateWindow& s);

/// Per-feature population mean and standard deviation of the rows; features
/// with zero spread keep scale 1.
FeatureScaling fit_scaling(std::span<const std::vector<double>> rows);

/// Scaled features with the bias appended. Throws std::invalid_argument when
/// the scaling does not match the window.
std::vector<double> featurize(const StateWindow& s, const FeatureScaling& scaling);

std::vector<double> q_values(const PolicyParams& params, std::span<const double> features);

/// Index of the largest value; the lowest index wins ties.
std::size_t greedy_index(std::span<const double> values);

/// Epsilon-greedy choice over the grid. Grid prices are inside the band by
/// construction, so the signal is never marked clamped.
PriceSignal select_action(const PolicyParams& params, std::span<const double> features, double epsilon,
                          const PriceGrid& grid, Rng& rng);

struct ClampResult {
  Price price = 0.0;
  bool violated = false;
};

ClampResult clamp_price(Price price, const PriceGrid& grid);

/// One-step Q-learning update of the taken action's weight row, in place.
/// Returns the TD error. Throws TrainingError when it is not finite.
double td_update(PolicyParams& params, const Transition& tr, double lr, double gamma);

}  // namespace voltmarket
