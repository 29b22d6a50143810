#include "gridvfa/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gridvfa {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 round over a combined word
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> draw_wind(const ExogenousModel& model, int stage,
                              int regime, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double mult =
      model.regime_multiplier.empty() ? 1.0 : model.regime_multiplier[regime];
  std::vector<double> wind(model.max_output.size());
  for (std::size_t q = 0; q < wind.size(); ++q) {
    const double mu = model.mean[stage][q] * mult;
    const double sigma = model.noise_scale * model.max_output[q];
    double w = mu + (sigma > 0 ? sigma * gauss(rng) : 0.0);
    wind[q] = std::clamp(w, 0.0, model.max_output[q]);
  }
  return wind;
}

int draw_regime(const ExogenousModel& model, int from, Rng& rng) {
  if (model.regime_count <= 1) return 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto& row = model.regime_transition[from];
  double acc = 0.0;
  for (int j = 0; j < model.regime_count; ++j) {
    acc += row[j];
    if (u <= acc) return j;
  }
  return model.regime_count - 1;
}

} // namespace

std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) { return mix(a, b); }

WindState pool_next(const ExogenousModel& model, const SamplePool& pool,
                    const WindState& state, int t, Rng& rng) {
  WindState next;
  next.regime = draw_regime(model, state.regime, rng);
  const auto& cell = pool.at(t + 1, next.regime);
  std::uniform_int_distribution<std::size_t> pick(0, cell.size() - 1);
  next.current_wind = cell[pick(rng)];
  return next;
}

WindState ExogenousModel::initial_state() const {
  WindState s;
  s.regime = initial_regime;
  const double mult =
      regime_multiplier.empty() ? 1.0 : regime_multiplier[initial_regime];
  s.current_wind.resize(max_output.size());
  for (std::size_t q = 0; q < max_output.size(); ++q)
    s.current_wind[q] = std::clamp(mean[0][q] * mult, 0.0, max_output[q]);
  return s;
}

const std::vector<std::vector<double>>& SamplePool::at(int t,
                                                       int regime) const {
  if (t < 1 || t > horizon)
    throw std::out_of_range("SamplePool::at: stage out of range");
  if (regime < 0 || regime >= regime_count)
    throw std::out_of_range("SamplePool::at: regime out of range");
  return outcomes[t - 1][regime];
}

WindState sample_next(const ExogenousModel& model, const WindState& state,
                      int t, Rng& rng) {
  WindState next;
  next.regime = model.mode == WindMode::markov_lag1
                    ? draw_regime(model, state.regime, rng)
                    : 0;
  next.current_wind = draw_wind(model, t + 1, next.regime, rng);
  return next;
}

SamplePool build_sample_pool(const ExogenousModel& model, int horizon,
                             int pool_size, std::uint64_t seed) {
  if (pool_size < 1)
    throw std::invalid_argument("build_sample_pool: pool_size must be >= 1");
  SamplePool pool;
  pool.horizon = horizon;
  pool.regime_count = model.regime_count;
  pool.pool_size = pool_size;
  pool.seed = seed;
  pool.outcomes.resize(horizon);
  for (int t = 1; t <= horizon; ++t) {
    pool.outcomes[t - 1].resize(model.regime_count);
    for (int r = 0; r < model.regime_count; ++r) {
      Rng rng(mix(seed, static_cast<std::uint64_t>(t) * 1024 + r));
      auto& cell = pool.outcomes[t - 1][r];
      cell.reserve(pool_size);
      for (int k = 0; k < pool_size; ++k)
        cell.push_back(draw_wind(model, t, r, rng));
    }
  }
  return pool;
}

SamplePool subsample_pool(const SamplePool& parent, int size,
                          std::uint64_t seed) {
  if (size < 1 || size > parent.pool_size)
    throw std::invalid_argument("subsample_pool: bad size");
  SamplePool pool;
  pool.horizon = parent.horizon;
  pool.regime_count = parent.regime_count;
  pool.pool_size = size;
  pool.seed = seed;
  pool.outcomes.resize(parent.horizon);
  for (int t = 1; t <= parent.horizon; ++t) {
    pool.outcomes[t - 1].resize(parent.regime_count);
    for (int r = 0; r < parent.regime_count; ++r) {
      Rng rng(mix(mix(seed, 0x5ULL), static_cast<std::uint64_t>(t) * 1024 + r));
      std::vector<int> idx(parent.pool_size);
      std::iota(idx.begin(), idx.end(), 0);
      // partial Fisher-Yates: first `size` entries are a uniform subset
      for (int k = 0; k < size; ++k) {
        std::uniform_int_distribution<int> pick(k, parent.pool_size - 1);
        std::swap(idx[k], idx[pick(rng)]);
      }
      auto& cell = pool.outcomes[t - 1][r];
      for (int k = 0; k < size; ++k)
        cell.push_back(parent.outcomes[t - 1][r][idx[k]]);
    }
  }
  return pool;
}

double pool_expectation(
    const SamplePool& pool, int t, int regime,
    const std::function<double(const std::vector<double>&)>& f) {
  const auto& cell = pool.at(t, regime);
  if (cell.empty()) throw std::invalid_argument("pool_expectation: empty pool");
  double acc = 0.0;
  for (const auto& w : cell) acc += f(w);
  return acc / static_cast<double>(cell.size());
}

std::vector<double> stationary_distribution(
    const std::vector<std::vector<double>>& transition) {
  const int n = static_cast<int>(transition.size());
  std::vector<double> pi(n, 1.0 / n), next(n);
  for (int iter = 0; iter < 10000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) next[j] += pi[i] * transition[i][j];
    double diff = 0.0;
    for (int j = 0; j < n; ++j) diff += std::abs(next[j] - pi[j]);
    pi.swap(next);
    if (diff < 1e-14) break;
  }
  return pi;
}

std::vector<std::string> validate_model(const ExogenousModel& model) {
  std::vector<std::string> v;
  if (model.noise_scale < 0) v.push_back("wind: noise_scale must be >= 0");
  if (model.regime_count < 1) v.push_back("wind: regime_count must be >= 1");
  if (model.mean.empty()) v.push_back("wind: empty mean profile");
  for (const auto& row : model.mean)
    if (row.size() != model.max_output.size()) {
      v.push_back("wind: mean profile width must equal farm count");
      break;
    }
  if (model.regime_count > 1) {
    if (static_cast<int>(model.regime_transition.size()) != model.regime_count)
      v.push_back("wind: transition matrix must be regime_count x regime_count");
    else
      for (const auto& row : model.regime_transition) {
        double s = std::accumulate(row.begin(), row.end(), 0.0);
        if (std::abs(s - 1.0) > 1e-12 ||
            static_cast<int>(row.size()) != model.regime_count) {
          v.push_back("wind: transition rows must sum to 1");
          break;
        }
      }
    if (static_cast<int>(model.regime_multiplier.size()) != model.regime_count)
      v.push_back("wind: one multiplier per regime required");
  }
  if (model.initial_regime < 0 || model.initial_regime >= model.regime_count)
    v.push_back("wind: initial_regime out of range");
  return v;
}

} // namespace gridvfa
