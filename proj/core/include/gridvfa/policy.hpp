#pragma once

#include <cstdint>

#include "gridvfa/grid.hpp"
#include "gridvfa/runlog.hpp"
#include "gridvfa/scenario.hpp"
#include "gridvfa/vfa.hpp"

namespace gridvfa {

/// One simulated decision path: wind states, post-decision resource states,
/// and realized immediate costs per stage 0..T.
struct Trajectory {
  std::vector<WindState> wind;
  std::vector<std::vector<double>> post_resource;
  std::vector<double> stage_costs;
  double total_cost() const;
};

/// A dispatch policy: solve each stage with value-to-go given by Benders
/// cuts, a separable PWL value function, or nothing (myopic).
struct PolicySpec {
  enum class Kind { myopic, cuts, vfa };
  Kind kind = Kind::myopic;
  const CutPool* cuts = nullptr;
  const SeparableVFA* vfa = nullptr;

  static PolicySpec myopic() { return {}; }
  static PolicySpec with_cuts(const CutPool& pool) {
    PolicySpec p;
    p.kind = Kind::cuts;
    p.cuts = &pool;
    return p;
  }
  static PolicySpec with_vfa(const SeparableVFA& vfa) {
    PolicySpec p;
    p.kind = Kind::vfa;
    p.vfa = &vfa;
    return p;
  }
};

/// Realized total cost of one simulated path. Wind comes from the sampled
/// pool when `pool` is non-null (in-sample) and from the full model
/// otherwise (out-of-sample). The path depends only on (model, path_seed),
/// so different policies evaluated with equal seeds face identical wind.
double simulate_one_path(const GridInstance& instance,
                         const ExogenousModel& model, const SamplePool* pool,
                         const PolicySpec& policy, std::uint64_t path_seed);

/// Per-path realized costs (path p uses seed_mix(seed, p)); the raw
/// ingredient for paired-path comparisons across policies.
std::vector<double> simulate_policy_costs(const GridInstance& instance,
                                          const ExogenousModel& model,
                                          const SamplePool* pool,
                                          const PolicySpec& policy, int paths,
                                          std::uint64_t seed);

/// Mean, standard error, min, max of realized cost over `paths` paths;
/// path p uses seed_mix(seed, p).
PolicyStats simulate_policy(const GridInstance& instance,
                            const ExogenousModel& model,
                            const SamplePool* pool, const PolicySpec& policy,
                            int paths, std::uint64_t seed);

} // namespace gridvfa
