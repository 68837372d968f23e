#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "voltmarket/core_model.hpp"
#include "voltmarket/reward.hpp"

namespace voltmarket {

enum class Bound { lower, upper };

struct Violation {
  std::size_t t = 0;
  Price attempted = 0.0;
  Bound bound = Bound::lower;
  Price clamped = 0.0;
};

struct ViolationLog {
  std::vector<Violation> entries;

  /// Records an entry only when `attempted` lies outside [p_min, p_max].
  void record(std::size_t t, Price attempted, Price p_min, Price p_max);
  bool empty() const { return entries.empty(); }
};

struct ViolationSummary {
  std::size_t count = 0;
  double max_abs = 0.0;
  double sum_abs = 0.0;
  std::size_t lower_count = 0;
  std::size_t upper_count = 0;
};

ViolationSummary summarize_violations(const ViolationLog& log);

struct StepRecord {
  std::size_t t = 0;
  Price price = 0.0;
  Kwh e_demand = 0.0;
  Kwh e_renewable = 0.0;
  Price purchase_price = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double total = 0.0;
};

struct EpisodeRecord {
  std::vector<StepRecord> steps;
  RewardWeights weights;
};

struct ObjectiveReturns {
  double sum_r1 = 0.0;
  double sum_r2 = 0.0;
  double sum_total = 0.0;
};

/// Per-objective sums over an episode. Throws std::invalid_argument when empty.
ObjectiveReturns objective_returns(const EpisodeRecord& episode);

struct AlignmentMetrics {
  double rmse = 0.0;
  /// Absent when either series has zero variance.
  std::optional<double> pearson;
};

/// Throws std::invalid_argument for fewer than two steps.
AlignmentMetrics alignment_metrics(const EpisodeRecord& episode);

/// Mean of -r2 over the episode (mean squared mismatch).
double mean_squared_mismatch(const EpisodeRecord& episode);

}  // namespace voltmarket
