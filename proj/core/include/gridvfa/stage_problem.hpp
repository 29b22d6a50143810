#pragma once

#include <optional>
#include <vector>

#include "gridvfa/grid.hpp"
#include "gridvfa/scenario.hpp"
#include "gridvfa/simplex.hpp"
#include "gridvfa/vfa.hpp"

namespace gridvfa {

/// Variable and row layout of one assembled stage program. Storage-balance
/// rows are tagged with the device index so the dual of the row whose
/// right-hand side carries R_{t,b} is recoverable per device.
struct StageTemplate {
  int t = 0;
  int num_generators = 0, num_devices = 0, num_buses = 0, num_lines = 0,
      num_farms = 0;
  int gen_start = 0, charge_start = 0, discharge_start = 0, rx_start = 0,
      angle_start = 0, flow_start = 0, unserved_start = 0, surplus_start = 0,
      curtail_start = 0;
  int value_var = -1;            // epigraph variable v (cuts mode)
  std::vector<int> spwl_z_start; // first segment variable per device (spwl)
  std::vector<int> flow_rows, balance_rows, storage_rows;
};

/// Which value-to-go representation to attach after the stage decision.
struct VfaAttachment {
  enum class Kind { none, cuts, spwl };
  Kind kind = Kind::none;
  const CutPool* pool = nullptr; // cuts mode
  int regime = 0;                // cuts mode: pool cell (t, regime)
  const SeparableVFA* vfa = nullptr; // spwl mode
  double lower_floor = 0.0; // valid because all stage costs are nonnegative

  static VfaAttachment none() { return {}; }
  static VfaAttachment with_cuts(const CutPool& pool, int regime) {
    VfaAttachment a;
    a.kind = Kind::cuts;
    a.pool = &pool;
    a.regime = regime;
    return a;
  }
  static VfaAttachment with_spwl(const SeparableVFA& vfa) {
    VfaAttachment a;
    a.kind = Kind::spwl;
    a.vfa = &vfa;
    return a;
  }
};

struct ProxTerm {
  std::vector<double> center; // per device, MWh
  double rho = 0.0;
};

struct StageProblem {
  ConvexProgram program;
  StageTemplate layout;
};

/// Assemble the stage-t subproblem: commitment bounds on generation, DC
/// power flow f = B(theta_i - theta_j) with |f| <= capacity and
/// theta_ref = 0, nodal balance with unserved/surplus slacks and free wind
/// curtailment, and storage balance R^x = R + eta_c*charge*dt -
/// eta_d*discharge*dt with R^x in [cap_lo, cap_hi]. At t = horizon the
/// attachment must be `none` (terminal value is identically zero).
StageProblem build_stage(const GridInstance& instance, int t,
                         const ResourceState& resource, const WindState& wind,
                         const VfaAttachment& vfa,
                         const std::optional<ProxTerm>& prox = std::nullopt);

/// Append epigraph variable v >= lower_floor with one row
/// v - <beta_j, R^x> >= alpha_j per cut. Returns the index of v.
int epigraph_of_cuts(ConvexProgram& program, const std::vector<int>& rx_vars,
                     const std::vector<Cut>& cuts, double lower_floor);

/// Append per-device segment variables z_s in [0, width] with objective
/// slope_s and the linking row R^x_b - sum_s z_s = cap_lo_b. Minimization
/// plus nondecreasing slopes makes segments fill in order. Returns the
/// first z index per device. Throws on a non-convex slope sequence.
std::vector<int> epigraph_of_spwl(ConvexProgram& program,
                                  const GridInstance& instance,
                                  const SeparableVFA& vfa, int t,
                                  const std::vector<int>& rx_vars);

/// beta_b = dual of the tagged storage-balance row for device b, i.e.
/// d(stage optimum)/d R_{t,b}. Requires an optimal solution.
std::vector<double> resource_duals(const Solution& solution,
                                   const StageTemplate& layout);

StageDecision extract_decision(const Solution& solution,
                               const StageTemplate& layout);

/// Post-decision storage energies R^x (MWh per device).
std::vector<double> extract_post_resource(const Solution& solution,
                                          const StageTemplate& layout);

/// The cost actually incurred this period: generation, storage throughput,
/// and slack penalties — the stage objective minus the value-to-go and
/// proximal parts.
double immediate_cost(const GridInstance& instance,
                      const StageTemplate& layout, const Solution& solution,
                      int t);

} // namespace gridvfa
