#include "voltmarket/pricing_agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "voltmarket/errors.hpp"

namespace voltmarket {

PriceGrid PriceGrid::uniform(Price p_min, Price p_max, std::size_t k) {
  PriceGrid g;
  g.p_min = p_min;
  g.p_max = p_max;
  if (p_min == p_max || k <= 1) {
    g.levels.push_back(p_min);
    return g;
  }
  g.levels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(k - 1);
    g.levels.push_back(i + 1 == k ? p_max : p_min + (p_max - p_min) * u);
  }
  return g;
}

std::vector<std::string> PriceGrid::violations() const {
  std::vector<std::string> out;
  if (!(std::isfinite(p_min) && std::isfinite(p_max) && p_min >= 0.0 && p_min <= p_max))
    out.emplace_back("price grid: need 0 <= p_min <= p_max");
  if (levels.empty()) {
    out.emplace_back("price grid: no levels");
    return out;
  }
  if (levels.front() < p_min || levels.back() > p_max) out.emplace_back("price grid: levels outside [p_min, p_max]");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) {
      out.emplace_back("price grid: levels must be strictly increasing");
      break;
    }
  }
  if (levels.size() < 2 && p_min != p_max) out.emplace_back("price grid: a non-degenerate band needs >= 2 levels");
  return out;
}

PolicyParams PolicyParams::zeros(std::size_t actions, std::size_t features) {
  PolicyParams p;
  p.actions = actions;
  p.features = features;
  p.weights.assign(actions * features, 0.0);
  return p;
}

std::vector<double> flatten_state(const StateWindow& s) {
  const std::size_t n = s.length();
  std::vector<double> x;
  x.reserve(kChannels * n);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.demand[k]);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.renewable[k]);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.purchase_price[k]);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.weather[k].temperature_c);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.weather[k].solar_irradiance);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.weather[k].wind_speed);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.temporal[k].hour_sin);
  for (std::size_t k = 0; k < n; ++k) x.push_back(s.temporal[k].hour_cos);
  return x;
}

FeatureScaling fit_scaling(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw std::invalid_argument("fit_scaling: no rows");
  const std::size_t f = rows.front().size();
  FeatureScaling s;
  s.mean.assign(f, 0.0);
  s.scale.assign(f, 0.0);
  for (const auto& r : rows) {
    if (r.size() != f) throw std::invalid_argument("fit_scaling: ragged rows");
    for (std::size_t j = 0; j < f; ++j) s.mean[j] += r[j];
  }
  const double n = static_cast<double>(rows.size());
  for (auto& m : s.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < f; ++j) {
      const double d = r[j] - s.mean[j];
      s.scale[j] += d * d;
    }
  }
  for (auto& v : s.scale) {
    const double sd = std::sqrt(v / n);
    v = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

std::vector<double> featurize(const StateWindow& s, const FeatureScaling& scaling) {
  std::vector<double> x = flatten_state(s);
  if (scaling.mean.size() != x.size() || scaling.scale.size() != x.size()) {
    std::ostringstream msg;
    msg << "featurize: scaling has " << scaling.mean.size() << " features, window flattens to " << x.size();
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - scaling.mean[j]) / scaling.scale[j];
  x.push_back(1.0);
  return x;
}

std::vector<double> q_values(const PolicyParams& params, std::span<const double> features) {
  if (features.size() != params.features) throw std::invalid_argument("q_values: feature dimension mismatch");
  std::vector<double> q(params.actions, 0.0);
  for (std::size_t a = 0; a < params.actions; ++a) {
    const auto w = params.row(a);
    double acc = 0.0;
    for (std::size_t j = 0; j < features.size(); ++j) acc += w[j] * features[j];
    q[a] = acc;
  }
  return q;
}

std::size_t greedy_index(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

PriceSignal select_action(const PolicyParams& params, std::span<const double> features, double epsilon,
                          const PriceGrid& grid, Rng& rng) {
  std::size_t index = 0;
  if (rng.uniform01() < epsilon) {
    index = rng.index(grid.size());
  } else {
    index = greedy_index(q_values(params, features));
  }
  return {grid.levels[index], index, false};
}

ClampResult clamp_price(Price price, const PriceGrid& grid) {
  const Price clamped = std::min(std::max(price, grid.p_min), grid.p_max);
  return {clamped, clamped != price};
}

double td_update(PolicyParams& params, const Transition& tr, double lr, double gamma) {
  if (tr.action_index >= params.actions) throw std::invalid_argument("td_update: action index out of range");
  const double q_sa = q_values(params, tr.features)[tr.action_index];
  double target = tr.reward;
  if (!tr.done) {
    const auto q_next = q_values(params, tr.next_features);
    target += gamma * q_next[greedy_index(q_next)];
  }
  const double delta = target - q_sa;
  if (!std::isfinite(delta)) {
    std::ostringstream msg;
    msg << "td_update: non-finite TD error (reward " << tr.reward << ", Q(s,a) " << q_sa << ", action "
        << tr.action_index << ")";
    throw TrainingError(msg.str());
  }
  auto w = params.row(tr.action_index);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] += lr * delta * tr.features[j];
  return delta;
}

}  // namespace voltmarket
