#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridvfa/grid.hpp"
#include "gridvfa/instance_io.hpp"
#include "gridvfa/policy.hpp"
#include "gridvfa/runlog.hpp"
#include "gridvfa/scenario.hpp"

namespace gridvfa {

/// Knobs for the synthetic-instance generator. Defaults are desk-scale;
/// the horizon default of 288 mirrors a 5-minute day.
struct InstanceSpec {
  int bus_count = 10;
  double line_density = 1.3; // lines ~= density * (bus_count - 1)
  int device_count = 1;
  int generator_count = 3;
  int wind_farm_count = 2;
  int horizon = 288;
  int regime_count = 1;
  double gen_cost_lo = 20.0; // $/MWh
  double gen_cost_hi = 60.0;
  double storage_cost = 0.5; // $/MWh throughput
  double noise_scale = 0.15; // wind sigma as a fraction of max output
  double period_hours = 1.0 / 12.0;
  double slack_penalty = 1e4;
  std::uint64_t seed = 0;
};

/// Connected random network (spanning tree plus extra edges); storage
/// placed at wind buses first, then at the highest-load buses.
/// Deterministic given the seed.
InstanceBundle generate_instance(const InstanceSpec& spec);

struct DeterministicSolution {
  double objective = 0.0;
  std::vector<StageDecision> decisions;
  std::vector<std::vector<double>> post_resource;
};

/// Exact optimum of the single full-horizon LP under a fixed wind path
/// (one wind vector per stage 0..T).
DeterministicSolution deterministic_optimum(
    const GridInstance& instance,
    const std::vector<std::vector<double>>& wind_path);

/// The wind path where every stage takes its (regime-adjusted initial,
/// then unconditional) mean — the natural path for deterministic runs.
std::vector<std::vector<double>> mean_wind_path(const ExogenousModel& model,
                                                int horizon);

/// Brute-force backward induction on a per-device resource grid (the
/// independent value oracle for cut validity). value[t] maps grid index ->
/// expected cost-to-go V*_t; stage 0 uses the known initial wind. Guarded
/// to <= 2 devices, T <= 3, pool_size <= 3, single regime.
struct ValueTables {
  int grid_points = 0;
  std::vector<std::vector<double>> levels; // per device, grid levels (MWh)
  std::vector<std::vector<double>> value;  // [stage][flattened grid index]

  double interpolate(int t, const std::vector<double>& resource) const;
};
ValueTables brute_force_dp(const GridInstance& instance,
                           const ExogenousModel& model,
                           const SamplePool& pool, int grid_points);

/// Sampled-model optimum by scenario-tree enumeration with shared
/// decisions on common prefixes; guarded to pool_size^T <= 64 paths and a
/// single regime.
double extensive_form_optimum(const GridInstance& instance,
                              const ExogenousModel& model,
                              const SamplePool& pool);

/// Myopic policy evaluation packaged as a RunLog for compare_report.
RunLog run_myopic(const InstanceBundle& bundle, int paths, std::uint64_t seed);

/// Deterministic full-horizon solve packaged as a RunLog.
RunLog run_deterministic(const InstanceBundle& bundle);

/// Report files computed from a set of runs of the same instance.
struct CompareReport {
  std::string bounds_csv;  // method,iteration,lb,ub_mean,ub_stderr,cuts
  std::string gap_csv;     // raw and myopic-adjusted terminal gaps
  std::string timing_csv;  // keyed by (devices, pool_size)
  std::string sampled_csv; // LB / out-of-sample UB by pool size
};
CompareReport compare_report(const std::vector<RunLog>& logs);

} // namespace gridvfa
