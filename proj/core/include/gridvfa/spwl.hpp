#pragma once

#include <cstdint>
#include <vector>

#include "gridvfa/instance_io.hpp"
#include "gridvfa/policy.hpp"
#include "gridvfa/runlog.hpp"
#include "gridvfa/scenario.hpp"
#include "gridvfa/simplex.hpp"
#include "gridvfa/vfa.hpp"

namespace gridvfa {

struct AdpConfig {
  int iterations = 100;  // K
  int segments = 20;     // uniform grid: width = (cap_hi - cap_lo)/segments
  double delta = 0.0;    // derivative perturbation; <= 0 means grid width
  double stepsize_a = 20.0; // alpha_k = a / (a + k)
  int ub_every = 25;
  int ub_paths = 100;
  std::uint64_t seed = 0;
};

struct NumericalDerivative {
  bool has_plus = false;
  bool has_minus = false;
  double plus = 0.0;  // (obj(R + delta e_m) - obj(R)) / delta
  double minus = 0.0; // (obj(R) - obj(R - delta e_m)) / delta
};

/// Forward simulation of the current VFA policy on the full model
/// (outcomes drawn on the fly, not from a pool). Per-stage basis hints,
/// when given, carry warm starts across iterations.
Trajectory adp_forward_pass(const GridInstance& instance,
                            const ExogenousModel& model,
                            const SeparableVFA& vfa, Rng& rng,
                            std::vector<BasisHint>* hints = nullptr);

/// One-sided derivatives of the stage-t optimum (with `vfa` attached for
/// t < horizon) with respect to the incoming energy of device m. A
/// perturbation that would leave the capacity range is flagged absent.
NumericalDerivative numerical_derivative(const GridInstance& instance, int t,
                                         const ResourceState& resource,
                                         const WindState& wind,
                                         const SeparableVFA& vfa, int device,
                                         double delta);

/// Closest nondecreasing sequence in the weighted least-squares sense
/// (pool-adjacent-violators); idempotent.
std::vector<double> convexity_projection(const std::vector<double>& slopes,
                                         const std::vector<double>& weights);

/// CAVE-style smoothing of one (stage, device) function: the segment to
/// the right of the observation blends toward the right derivative, the
/// one to its left toward the left derivative, then the whole slope
/// sequence is re-projected onto convexity.
void cave_update(SeparableVFA& vfa, const GridInstance& instance, int t,
                 int device, double r_observed,
                 const NumericalDerivative& derivative, double alpha);

/// Backward sweep t = T-1 .. 0: derivatives of the (already updated)
/// stage-(t+1) problem at the trajectory's pre-decision state feed the
/// stage-t update at the observed post-decision level, with stepsize
/// alpha_k = a/(a+k).
void adp_backward_pass(const GridInstance& instance, SeparableVFA& vfa,
                       const Trajectory& trajectory, int k,
                       const AdpConfig& config,
                       std::vector<BasisHint>* hints = nullptr);

struct AdpResult {
  RunLog log;
  SeparableVFA vfa;
};

AdpResult run_adp(const InstanceBundle& bundle, const AdpConfig& config);

/// Structured-text serialization (stage -> device -> slope vector).
std::string vfa_to_text(const SeparableVFA& vfa);
SeparableVFA vfa_from_text(const std::string& text);

} // namespace gridvfa
