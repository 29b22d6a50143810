#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gridvfa {

/// One node of the transmission network.
struct Bus {
  bool operator==(const Bus&) const = default;
  int id = 0;
  std::vector<double> load_profile;  // MW, one entry per stage 0..T
  double phase_angle_bound = 0.5;    // rad, symmetric
};

struct TransmissionLine {
  bool operator==(const TransmissionLine&) const = default;
  int from_bus = 0;
  int to_bus = 0;
  double susceptance = 1.0;     // per unit
  double flow_capacity = 100.0; // MW
};

struct Generator {
  bool operator==(const Generator&) const = default;
  int bus = 0;
  double kappa_lo = 0.0;            // MW
  double kappa_hi = 0.0;            // MW
  std::vector<double> cost_profile; // $/MWh per stage
  std::vector<int> commitment;      // 0/1 per stage
};

struct StorageDevice {
  bool operator==(const StorageDevice&) const = default;
  int bus = 0;
  double cap_lo = 0.0;         // MWh
  double cap_hi = 0.0;         // MWh
  double eta_charge = 0.9;     // in (0,1], applied to charging flow
  double eta_discharge = 1.1;  // >= 1, applied to discharging flow
  std::vector<double> cost;    // $/MWh per stage, charged on throughput
  double initial_energy = 0.0; // MWh
};

struct WindFarm {
  bool operator==(const WindFarm&) const = default;
  int bus = 0;
  double max_output = 0.0; // MW
};

/// The full problem datum: network, devices, commitment schedules, loads.
/// Decision periods are t = 0..horizon inclusive.
struct GridInstance {
  std::vector<Bus> buses;
  std::vector<TransmissionLine> lines;
  std::vector<Generator> generators;
  std::vector<StorageDevice> storage_devices;
  std::vector<WindFarm> wind_farms;
  int horizon = 1;             // T; stages are 0..T
  double period_hours = 1.0 / 12.0; // Delta: MW decision held for this long
  double slack_penalty = 1e4;  // $/MWh for unserved load
  int reference_bus = 0;

  int num_stages() const { return horizon + 1; }
  bool operator==(const GridInstance&) const = default;
};

/// Energy in each storage device (MWh). Generator output is carried for
/// completeness but excluded from the value function.
struct ResourceState {
  std::vector<double> storage_energy;
  std::vector<double> generator_output;
};

struct StageDecision {
  std::vector<double> gen_output;      // MW per generator
  std::vector<double> charge;          // MW per device
  std::vector<double> discharge;       // MW per device
  std::vector<double> angles;          // rad per bus
  std::vector<double> line_flows;      // MW per line
  std::vector<double> unserved;        // MW per bus
  std::vector<double> curtailed_wind;  // MW per farm
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const GridInstance& instance);

/// Post-decision storage energy:
///   energy' = energy + eta_charge * charge * dt - eta_discharge * discharge * dt.
/// Bound enforcement is the stage program's job. Throws on negative flows.
double storage_transition(const StorageDevice& device, double energy,
                          double charge_mw, double discharge_mw,
                          double period_hours);

/// Net power injected at each bus: generation + storage discharge - charge
/// + wind after curtailment.
std::vector<double> nodal_injection(const GridInstance& instance,
                                    const StageDecision& decision,
                                    const std::vector<double>& wind_mw, int t);

/// Linear stage cost: committed generation + storage throughput + unserved
/// load penalty, all converted MW -> MWh by period_hours.
double stage_cost(const GridInstance& instance, const StageDecision& decision,
                  int t);

/// Output bounds implied by the commitment schedule at stage t:
/// (kappa_lo, kappa_lo) when newly online, (kappa_lo, kappa_hi) when
/// continuing, (0, 0) when off.
std::pair<double, double> commitment_bounds(const Generator& gen, int t);

} // namespace gridvfa
