#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace gridvfa {

enum class WindMode { stagewise_independent, markov_lag1 };

/// Wind at one instant: MW per farm plus the weather regime (markov mode;
/// always 0 in stagewise-independent mode).
struct WindState {
  std::vector<double> current_wind;
  int regime = 0;
};

/// The full exogenous wind process. Outcomes are truncated Gaussians around
/// a stage-dependent mean profile, optionally scaled by a finite Markov
/// regime chain.
struct ExogenousModel {
  WindMode mode = WindMode::stagewise_independent;
  std::vector<std::vector<double>> mean;  // [stage][farm], MW
  double noise_scale = 0.0;               // sigma as a fraction of max_output
  std::vector<double> max_output;         // MW per farm (clip range)
  int regime_count = 1;
  std::vector<double> regime_multiplier;          // per regime, scales mean
  std::vector<std::vector<double>> regime_transition; // row-stochastic
  int initial_regime = 0;
  std::uint64_t seed = 0;

  bool operator==(const ExogenousModel&) const = default;
  int num_farms() const { return static_cast<int>(max_output.size()); }
  WindState initial_state() const;
};

/// Fixed per-stage, per-regime outcome sets with equal weights. Entries
/// exist for stages 1..T; stage 0 wind is the model's known initial state.
struct SamplePool {
  int horizon = 0;     // T
  int regime_count = 1;
  int pool_size = 0;
  std::uint64_t seed = 0;
  // outcomes[t-1][regime][k] is the k-th wind vector for stage t
  std::vector<std::vector<std::vector<std::vector<double>>>> outcomes;

  const std::vector<std::vector<double>>& at(int t, int regime) const;
};

using Rng = std::mt19937_64;

/// Draw the state for stage t+1. In markov mode the regime is advanced
/// first, then wind is drawn conditional on the new regime.
WindState sample_next(const ExogenousModel& model, const WindState& state,
                      int t, Rng& rng);

/// Deterministic seed mixer (one splitmix64 round) used to derive
/// independent streams; public so paired-path policy evaluation can put
/// different policies on identical wind paths.
std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b);

/// Draw the stage-(t+1) wind from the sampled pool: the regime advances by
/// the model chain, then an outcome is picked uniformly from the cell.
WindState pool_next(const ExogenousModel& model, const SamplePool& pool,
                    const WindState& state, int t, Rng& rng);

/// Deterministic function of (model, T, pool_size, seed); each (stage,
/// regime) cell uses an independent stream so pools of different sizes
/// share a common prefix.
SamplePool build_sample_pool(const ExogenousModel& model, int horizon,
                             int pool_size, std::uint64_t seed);

/// Pick `size` entries per cell without replacement from `parent`.
SamplePool subsample_pool(const SamplePool& parent, int size,
                          std::uint64_t seed);

/// Equal-weight average of f over the stage-t pool entries of one regime.
double pool_expectation(
    const SamplePool& pool, int t, int regime,
    const std::function<double(const std::vector<double>&)>& f);

/// Stationary distribution of the regime chain (power iteration).
std::vector<double> stationary_distribution(
    const std::vector<std::vector<double>>& transition);

/// Validation used by instance loading and tests.
std::vector<std::string> validate_model(const ExogenousModel& model);

} // namespace gridvfa
