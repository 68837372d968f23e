#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "voltmarket/rng.hpp"
#include "voltmarket/telemetry.hpp"

using namespace voltmarket;

namespace {

EpisodeRecord series(const std::vector<double>& renewable, const std::vector<double>& demand) {
  EpisodeRecord ep;
  for (std::size_t t = 0; t < demand.size(); ++t) {
    StepRecord s;
    s.t = t;
    s.e_renewable = renewable[t];
    s.e_demand = demand[t];
    s.r2 = -(renewable[t] - demand[t]) * (renewable[t] - demand[t]);
    ep.steps.push_back(s);
  }
  return ep;
}

}  // namespace

TEST_CASE("violation summaries") {
  ViolationLog empty;
  const auto z = summarize_violations(empty);
  CHECK(z.count == 0);
  CHECK(z.max_abs == 0.0);
  CHECK(z.sum_abs == 0.0);

  ViolationLog one;
  one.record(3, 0.42, 0.05, 0.40);
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].bound == Bound::upper);
  CHECK(one.entries[0].clamped == 0.40);
  const auto s = summarize_violations(one);
  CHECK(s.count == 1);
  CHECK(s.max_abs == doctest::Approx(0.02));
  CHECK(s.sum_abs == doctest::Approx(0.02));
  CHECK(s.upper_count == 1);
}

TEST_CASE("random violation log against a recount") {
  Rng rng(5);
  ViolationLog log;
  std::size_t lower = 0, upper = 0;
  double max_abs = 0.0, sum_abs = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const bool below = rng.uniform01() < 0.5;
    const double price = below ? rng.uniform(-0.5, 0.049) : rng.uniform(0.41, 1.0);
    log.record(i, price, 0.05, 0.40);
    const double excess = below ? 0.05 - price : price - 0.40;
    (below ? lower : upper)++;
    max_abs = std::max(max_abs, excess);
    sum_abs += excess;
  }
  const auto s = summarize_violations(log);
  CHECK(s.count == 1000);
  CHECK(s.lower_count == lower);
  CHECK(s.upper_count == upper);
  CHECK(s.max_abs == max_abs);
  CHECK(s.sum_abs == doctest::Approx(sum_abs).epsilon(1e-12));
}

TEST_CASE("objective returns") {
  EpisodeRecord zero;
  zero.steps.resize(4);
  const auto z = objective_returns(zero);
  CHECK(z.sum_r1 == 0.0);
  CHECK(z.sum_total == 0.0);

  EpisodeRecord single;
  single.steps.push_back({0, 0.2, 1, 1, 0.1, 0.1, -3.0, -2.9});
  const auto s = objective_returns(single);
  CHECK(s.sum_r1 == 0.1);
  CHECK(s.sum_r2 == -3.0);
  CHECK(s.sum_total == -2.9);

  Rng rng(8);
  EpisodeRecord ep;
  double a = 0, b = 0, c = 0;
  for (std::size_t t = 0; t < 168; ++t) {
    StepRecord r;
    r.r1 = rng.uniform(-1, 1);
    r.r2 = -rng.uniform(0, 50);
    r.total = r.r1 + r.r2;
    a += r.r1;
    b += r.r2;
    c += r.total;
    ep.steps.push_back(r);
  }
  const auto got = objective_returns(ep);
  CHECK(got.sum_r1 == doctest::Approx(a).epsilon(1e-12));
  CHECK(got.sum_r2 == doctest::Approx(b).epsilon(1e-12));
  CHECK(got.sum_total == doctest::Approx(c).epsilon(1e-12));
  CHECK_THROWS_AS(objective_returns(EpisodeRecord{}), std::invalid_argument);
}

TEST_CASE("alignment metrics") {
  SUBCASE("identical constant series") {
    const auto m = alignment_metrics(series({3, 3, 3}, {3, 3, 3}));
    CHECK(m.rmse == 0.0);
    CHECK_FALSE(m.pearson.has_value());
  }
  SUBCASE("identical varying series") {
    const auto m = alignment_metrics(series({1, 2, 4}, {1, 2, 4}));
    CHECK(m.rmse == 0.0);
    REQUIRE(m.pearson);
    CHECK(*m.pearson == doctest::Approx(1.0));
  }
  SUBCASE("constant offset") {
    const auto m = alignment_metrics(series({11, 12, 15, 9}, {1, 2, 5, -1}));
    CHECK(m.rmse == doctest::Approx(10.0));
    REQUIRE(m.pearson);
    CHECK(*m.pearson == doctest::Approx(1.0));
  }
  SUBCASE("random series") {
    Rng rng(21);
    std::vector<double> r(200), d(200);
    for (std::size_t i = 0; i < 200; ++i) {
      r[i] = rng.uniform(0, 30);
      d[i] = 0.5 * r[i] + rng.uniform(0, 20);
    }
    const auto mo = oracle::moments(r, d);
    double sq = 0.0;
    for (std::size_t i = 0; i < 200; ++i) sq += (r[i] - d[i]) * (r[i] - d[i]);
    const auto m = alignment_metrics(series(r, d));
    CHECK(std::abs(m.rmse - std::sqrt(sq / 200.0)) < 1e-9);
    REQUIRE(m.pearson);
    CHECK(std::abs(*m.pearson - mo.cov / std::sqrt(mo.var_a * mo.var_b)) < 1e-9);
    CHECK(std::abs(mean_squared_mismatch(series(r, d)) - sq / 200.0) < 1e-9);
  }
  CHECK_THROWS_AS(alignment_metrics(series({1}, {1})), std::invalid_argument);
}
