#include "voltmarket/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace voltmarket {

void ViolationLog::record(std::size_t t, Price attempted, Price p_min, Price p_max) {
  if (attempted < p_min) {
    entries.push_back({t, attempted, Bound::lower, p_min});
  } else if (attempted > p_max) {
    entries.push_back({t, attempted, Bound::upper, p_max});
  }
}

ViolationSummary summarize_violations(const ViolationLog& log) {
  ViolationSummary s;
  for (const auto& v : log.entries) {
    const double excess = std::abs(v.attempted - v.clamped);
    ++s.count;
    s.sum_abs += excess;
    s.max_abs = std::max(s.max_abs, excess);
    if (v.bound == Bound::lower) {
      ++s.lower_count;
    } else {
      ++s.upper_count;
    }
  }
  return s;
}

ObjectiveReturns objective_returns(const EpisodeRecord& episode) {
  if (episode.steps.empty()) throw std::invalid_argument("objective_returns: empty episode");
  ObjectiveReturns out;
  for (const auto& s : episode.steps) {
    out.sum_r1 += s.r1;
    out.sum_r2 += s.r2;
    out.sum_total += s.total;
  }
  return out;
}

AlignmentMetrics alignment_metrics(const EpisodeRecord& episode) {
  const std::size_t n = episode.steps.size();
  if (n < 2) throw std::invalid_argument("alignment_metrics: need at least two steps");
  double mean_r = 0.0, mean_d = 0.0, sq = 0.0;
  for (const auto& s : episode.steps) {
    mean_r += s.e_renewable;
    mean_d += s.e_demand;
    const double gap = s.e_renewable - s.e_demand;
    sq += gap * gap;
  }
  const double nd = static_cast<double>(n);
  mean_r /= nd;
  mean_d /= nd;
  double cov = 0.0, var_r = 0.0, var_d = 0.0;
  for (const auto& s : episode.steps) {
    const double a = s.e_renewable - mean_r;
    const double b = s.e_demand - mean_d;
    cov += a * b;
    var_r += a * a;
    var_d += b * b;
  }
  const auto& first = episode.steps.front();
  const bool flat_r = std::all_of(episode.steps.begin(), episode.steps.end(),
                                  [&](const StepRecord& s) { return s.e_renewable == first.e_renewable; });
  const bool flat_d = std::all_of(episode.steps.begin(), episode.steps.end(),
                                  [&](const StepRecord& s) { return s.e_demand == first.e_demand; });
  AlignmentMetrics out;
  out.rmse = std::sqrt(sq / nd);
  if (!flat_r && !flat_d && var_r > 0.0 && var_d > 0.0) out.pearson = std::clamp(cov / std::sqrt(var_r * var_d), -1.0, 1.0);
  return out;
}

double mean_squared_mismatch(const EpisodeRecord& episode) {
  if (episode.steps.empty()) throw std::invalid_argument("mean_squared_mismatch: empty episode");
  double acc = 0.0;
  for (const auto& s : episode.steps) acc -= s.r2;
  return acc / static_cast<double>(episode.steps.size());
}

}  // namespace voltmarket
