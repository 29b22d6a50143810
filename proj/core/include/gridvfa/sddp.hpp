#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridvfa/instance_io.hpp"
#include "gridvfa/policy.hpp"
#include "gridvfa/runlog.hpp"
#include "gridvfa/scenario.hpp"
#include "gridvfa/stage_problem.hpp"
#include "gridvfa/vfa.hpp"

namespace gridvfa {

struct SddpConfig {
  int pool_size = 20;   // |Omega_hat_t| per (stage, regime)
  int iterations = 50;  // K, fixed budget (no gap-based stop)
  double rho0 = 0.0;    // proximal weight, rho_k = rho0 / sqrt(k)
  int ub_every = 25;    // UB cadence; iterations 1 and K always included
  int ub_paths = 100;   // M
  bool ub_out_of_sample = false; // UB paths from full model instead of pool
  std::uint64_t seed = 0;
};

struct StageSolve {
  Solution solution;
  StageTemplate layout;
};

/// Solve one stage with cuts attached (none at t = horizon), reusing and
/// refreshing the hint. Shared by the forward pass, backward pass, and
/// lower bound so all of them price stages identically.
StageSolve solve_stage_with_cuts(const GridInstance& instance, int t,
                                 const ResourceState& resource,
                                 const WindState& wind, const CutPool& cuts,
                                 const std::optional<ProxTerm>& prox,
                                 BasisHint* hint);

/// Persistent solver state for one (stage, regime) subproblem across many
/// solves: the assembled program (kept for its layout), a live resolve
/// session, and the number of cut rows already present in the session.
/// Reuse refreshes right-hand sides and curtailment bounds and appends only
/// the cut rows added since the last use, so the factorized basis carries
/// across iterations instead of being rebuilt from scratch.
struct StageSessionCell {
  StageProblem problem;
  std::optional<ResolveSession> session;
  std::size_t cuts_attached = 0;
};

/// Cells indexed by stage * regime_count + regime; sized on first use.
using SddpWorkspace = std::vector<StageSessionCell>;

Trajectory forward_pass(const GridInstance& instance,
                        const ExogenousModel& model, const SamplePool& pool,
                        const CutPool& cuts, int k,
                        const Trajectory* prev_trajectory, double rho0,
                        Rng& rng, std::vector<BasisHint>* hints = nullptr,
                        SddpWorkspace* workspace = nullptr);

/// For t = T down to 1: solve the stage-t problem at the trajectory's
/// R^x_{t-1} for every pool outcome (and every successor regime in markov
/// mode) against the already-updated stage-t pool, then append to stage
/// t-1 one averaged cut per predecessor regime:
///   beta = mean of duals, alpha = mean objective - <beta, R^x_{t-1}>,
/// with means weighted by the regime transition row.
void backward_pass(const GridInstance& instance, const ExogenousModel& model,
                   const SamplePool& pool, CutPool& cuts,
                   const Trajectory& trajectory, int k,
                   std::vector<BasisHint>* hints = nullptr,
                   SddpWorkspace* workspace = nullptr);

/// Optimal objective of the stage-0 problem under the current cuts —
/// deterministic lower bound for the sampled model.
double lower_bound(const GridInstance& instance, const ExogenousModel& model,
                   const CutPool& cuts, BasisHint* hint = nullptr);

/// Policy simulation UB over `paths` paths; in-sample when `pool` is
/// non-null, out-of-sample otherwise.
std::pair<double, double> estimate_upper_bound(const GridInstance& instance,
                                               const ExogenousModel& model,
                                               const SamplePool* pool,
                                               const CutPool& cuts, int paths,
                                               std::uint64_t seed);

struct SddpResult {
  RunLog log;
  CutPool cuts;
  SamplePool pool;
};

SddpResult run_sddp(const InstanceBundle& bundle, const SddpConfig& config);

/// Structured-text serialization of a trained cut pool.
std::string cuts_to_text(const CutPool& cuts);
CutPool cuts_from_text(const std::string& text);

} // namespace gridvfa
