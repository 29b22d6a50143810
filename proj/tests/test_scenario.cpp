#include <doctest.h>

#include <cmath>
#include <set>

#include "gridvfa/scenario.hpp"

using namespace gridvfa;

namespace {

ExogenousModel two_farm_model(int stages) {
  ExogenousModel m;
  m.max_output = {10.0, 6.0};
  m.mean.assign(stages, {4.0, 2.0});
  for (int t = 0; t < stages; ++t) m.mean[t][0] = 3.0 + 0.5 * t;
  m.noise_scale = 0.1;
  m.seed = 11;
  return m;
}

ExogenousModel markov_model(int stages) {
  ExogenousModel m = two_farm_model(stages);
  m.mode = WindMode::markov_lag1;
  m.regime_count = 3;
  m.regime_multiplier = {0.5, 1.0, 1.4};
  m.regime_transition = {{0.7, 0.2, 0.1}, {0.15, 0.7, 0.15}, {0.1, 0.3, 0.6}};
  m.initial_regime = 1;
  return m;
}

} // namespace

TEST_CASE("zero noise reproduces the mean path") {
  ExogenousModel m = two_farm_model(4);
  m.noise_scale = 0.0;
  Rng rng(1);
  WindState s = m.initial_state();
  const WindState next = sample_next(m, s, 0, rng);
  CHECK(next.current_wind[0] == doctest::Approx(m.mean[1][0]));
  CHECK(next.current_wind[1] == doctest::Approx(m.mean[1][1]));
  CHECK(next.regime == 0);
}

TEST_CASE("single-regime chain never leaves regime 0") {
  ExogenousModel m = two_farm_model(4);
  Rng rng(5);
  WindState s = m.initial_state();
  for (int t = 0; t < 3; ++t) {
    s = sample_next(m, s, t, rng);
    CHECK(s.regime == 0);
  }
}

TEST_CASE("deterministic transition row forces the regime") {
  ExogenousModel m = two_farm_model(4);
  m.mode = WindMode::markov_lag1;
  m.regime_count = 2;
  m.regime_multiplier = {1.0, 1.0};
  m.regime_transition = {{0.0, 1.0}, {0.0, 1.0}};
  m.initial_regime = 0;
  Rng rng(9);
  WindState s = m.initial_state();
  s = sample_next(m, s, 0, rng);
  CHECK(s.regime == 1);
}

TEST_CASE("sampled wind stays within physical bounds") {
  ExogenousModel m = two_farm_model(6);
  m.noise_scale = 2.0; // extreme noise to force clipping
  Rng rng(3);
  WindState s = m.initial_state();
  for (int rep = 0; rep < 200; ++rep) {
    s = sample_next(m, s, rep % 5, rng);
    for (std::size_t q = 0; q < s.current_wind.size(); ++q) {
      CHECK(s.current_wind[q] >= 0.0);
      CHECK(s.current_wind[q] <= m.max_output[q]);
    }
  }
}

TEST_CASE("sample pools are deterministic in the seed") {
  const ExogenousModel m = two_farm_model(5);
  const SamplePool a = build_sample_pool(m, 4, 8, 42);
  const SamplePool b = build_sample_pool(m, 4, 8, 42);
  CHECK(a.outcomes == b.outcomes);
  const SamplePool c = build_sample_pool(m, 4, 8, 43);
  CHECK(a.outcomes != c.outcomes);
}

TEST_CASE("pool_size=1 with zero noise is the mean path") {
  ExogenousModel m = two_farm_model(5);
  m.noise_scale = 0.0;
  const SamplePool pool = build_sample_pool(m, 4, 1, 1);
  for (int t = 1; t <= 4; ++t) {
    const auto& cell = pool.at(t, 0);
    REQUIRE(cell.size() == 1);
    CHECK(cell[0][0] == doctest::Approx(m.mean[t][0]));
    CHECK(cell[0][1] == doctest::Approx(m.mean[t][1]));
  }
}

TEST_CASE("subpools are subsets of the parent pool") {
  const ExogenousModel m = two_farm_model(5);
  const SamplePool parent = build_sample_pool(m, 4, 100, 7);
  const SamplePool sub = subsample_pool(parent, 20, 99);
  for (int t = 1; t <= 4; ++t) {
    std::set<std::vector<double>> parent_set(parent.at(t, 0).begin(),
                                             parent.at(t, 0).end());
    std::set<std::vector<double>> seen;
    for (const auto& w : sub.at(t, 0)) {
      CHECK(parent_set.count(w) == 1);
      CHECK(seen.insert(w).second); // without replacement
    }
  }
  CHECK_THROWS(subsample_pool(parent, 0, 1));
  CHECK_THROWS(subsample_pool(parent, 101, 1));
}

TEST_CASE("pool expectation is the equal-weight mean") {
  const ExogenousModel m = two_farm_model(3);
  const SamplePool pool = build_sample_pool(m, 2, 5, 2);
  CHECK(pool_expectation(pool, 1, 0, [](const auto&) { return 7.0; }) ==
        doctest::Approx(7.0));
  double mean = 0.0;
  for (const auto& w : pool.at(1, 0)) mean += w[0];
  mean /= 5.0;
  CHECK(pool_expectation(pool, 1, 0, [](const auto& w) { return w[0]; }) ==
        doctest::Approx(mean));
}

TEST_CASE("empirical regime frequencies match the stationary distribution") {
  const ExogenousModel m = markov_model(8);
  const auto pi = stationary_distribution(m.regime_transition);
  const int n = 100000;
  std::vector<int> count(3, 0);
  Rng rng(17);
  WindState s = m.initial_state();
  for (int k = 0; k < n; ++k) {
    s = sample_next(m, s, k % 7, rng);
    ++count[s.regime];
  }
  for (int r = 0; r < 3; ++r) {
    const double freq = static_cast<double>(count[r]) / n;
    const double se = std::sqrt(pi[r] * (1 - pi[r]) / n);
    // dependent draws inflate the variance; allow a generous multiple
    CHECK(std::abs(freq - pi[r]) <= 3.0 * 3.0 * se);
  }
}

TEST_CASE("model validation catches malformed transition matrices") {
  ExogenousModel m = markov_model(4);
  CHECK(validate_model(m).empty());
  m.regime_transition[0] = {0.5, 0.2, 0.2};
  CHECK_FALSE(validate_model(m).empty());
}
