#include "gridvfa/grid.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace gridvfa {

namespace {

void check(std::vector<std::string>& out, bool cond, const std::string& msg) {
  if (!cond) out.push_back(msg);
}

bool finite_all(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

} // namespace

ValidationReport validate_instance(const GridInstance& instance) {
  ValidationReport report;
  auto& v = report.violations;
  const int n_bus = static_cast<int>(instance.buses.size());
  const int stages = instance.num_stages();

  check(v, instance.horizon >= 1, "horizon: T must be >= 1");
  check(v, instance.period_hours > 0, "meta: period_hours must be positive");
  check(v, n_bus >= 1, "buses: at least one bus required");
  check(v, instance.reference_bus >= 0 && instance.reference_bus < n_bus,
        "meta: reference_bus out of range");

  for (std::size_t i = 0; i < instance.buses.size(); ++i) {
    const Bus& b = instance.buses[i];
    const std::string tag = "bus " + std::to_string(i);
    check(v, static_cast<int>(b.load_profile.size()) == stages,
          tag + ": load_profile length must equal T+1");
    check(v, b.phase_angle_bound > 0, tag + ": phase bound must be positive");
    for (double d : b.load_profile)
      if (d < 0) {
        v.push_back(tag + ": negative load");
        break;
      }
  }

  auto bus_ok = [&](int id) { return id >= 0 && id < n_bus; };

  for (std::size_t i = 0; i < instance.lines.size(); ++i) {
    const TransmissionLine& l = instance.lines[i];
    const std::string tag = "line " + std::to_string(i);
    check(v, bus_ok(l.from_bus) && bus_ok(l.to_bus),
          tag + ": dangling bus reference");
    check(v, l.from_bus != l.to_bus, tag + ": self loop");
    check(v, l.susceptance > 0, tag + ": susceptance must be positive");
    check(v, l.flow_capacity > 0, tag + ": capacity must be positive");
  }

  for (std::size_t i = 0; i < instance.generators.size(); ++i) {
    const Generator& g = instance.generators[i];
    const std::string tag = "generator " + std::to_string(i);
    check(v, bus_ok(g.bus), tag + ": dangling bus reference");
    check(v, 0 <= g.kappa_lo && g.kappa_lo <= g.kappa_hi,
          tag + ": capacity order violated (0 <= kappa_lo <= kappa_hi)");
    check(v, static_cast<int>(g.commitment.size()) == stages,
          tag + ": commitment length must equal T+1");
    check(v, static_cast<int>(g.cost_profile.size()) == stages,
          tag + ": cost_profile length must equal T+1");
    for (double c : g.cost_profile)
      if (c < 0) {
        v.push_back(tag + ": negative cost");
        break;
      }
    for (int z : g.commitment)
      if (z != 0 && z != 1) {
        v.push_back(tag + ": commitment entries must be 0/1");
        break;
      }
  }

  for (std::size_t i = 0; i < instance.storage_devices.size(); ++i) {
    const StorageDevice& s = instance.storage_devices[i];
    const std::string tag = "storage " + std::to_string(i);
    check(v, bus_ok(s.bus), tag + ": dangling bus reference");
    check(v, 0 <= s.cap_lo && s.cap_lo < s.cap_hi,
          tag + ": capacity order violated (0 <= cap_lo < cap_hi)");
    check(v, s.eta_charge > 0 && s.eta_charge <= 1,
          tag + ": eta_charge must lie in (0,1]");
    check(v, s.eta_discharge >= 1, tag + ": eta_discharge must be >= 1");
    check(v, static_cast<int>(s.cost.size()) == stages,
          tag + ": cost length must equal T+1");
    check(v, s.initial_energy >= s.cap_lo && s.initial_energy <= s.cap_hi,
          tag + ": initial_energy outside capacity bounds");
  }

  for (std::size_t i = 0; i < instance.wind_farms.size(); ++i) {
    const WindFarm& w = instance.wind_farms[i];
    const std::string tag = "wind " + std::to_string(i);
    check(v, bus_ok(w.bus), tag + ": dangling bus reference");
    check(v, w.max_output >= 0, tag + ": max_output must be >= 0");
  }

  // slack penalty must dominate every marginal cost, else shedding can be
  // cheaper than serving
  double max_cost = 0.0;
  for (const auto& g : instance.generators)
    for (double c : g.cost_profile) max_cost = std::max(max_cost, c);
  for (const auto& s : instance.storage_devices)
    for (double c : s.cost) max_cost = std::max(max_cost, c);
  check(v, instance.slack_penalty > max_cost,
        "meta: slack_penalty must strictly exceed all generator/storage costs");

  // connectivity (only meaningful if all line endpoints are valid)
  if (n_bus >= 1) {
    bool endpoints_ok = true;
    for (const auto& l : instance.lines)
      endpoints_ok = endpoints_ok && bus_ok(l.from_bus) && bus_ok(l.to_bus);
    if (endpoints_ok) {
      std::vector<char> seen(n_bus, 0);
      std::queue<int> q;
      q.push(0);
      seen[0] = 1;
      int count = 1;
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (const auto& l : instance.lines) {
          int other = -1;
          if (l.from_bus == u) other = l.to_bus;
          else if (l.to_bus == u) other = l.from_bus;
          if (other >= 0 && !seen[other]) {
            seen[other] = 1;
            ++count;
            q.push(other);
          }
        }
      }
      check(v, count == n_bus, "network: bus graph is not connected");
    }
  }

  return report;
}

double storage_transition(const StorageDevice& device, double energy,
                          double charge_mw, double discharge_mw,
                          double period_hours) {
  if (charge_mw < 0 || discharge_mw < 0)
    throw std::invalid_argument("storage_transition: flows must be nonnegative");
  return energy + device.eta_charge * charge_mw * period_hours -
         device.eta_discharge * discharge_mw * period_hours;
}

std::vector<double> nodal_injection(const GridInstance& instance,
                                    const StageDecision& decision,
                                    const std::vector<double>& wind_mw,
                                    int /*t*/) {
  const std::size_t n_bus = instance.buses.size();
  if (decision.gen_output.size() != instance.generators.size() ||
      decision.charge.size() != instance.storage_devices.size() ||
      decision.discharge.size() != instance.storage_devices.size() ||
      wind_mw.size() != instance.wind_farms.size() ||
      decision.curtailed_wind.size() != instance.wind_farms.size())
    throw std::invalid_argument("nodal_injection: dimension mismatch");

  std::vector<double> p(n_bus, 0.0);
  for (std::size_t g = 0; g < instance.generators.size(); ++g)
    p[instance.generators[g].bus] += decision.gen_output[g];
  for (std::size_t b = 0; b < instance.storage_devices.size(); ++b)
    p[instance.storage_devices[b].bus] +=
        decision.discharge[b] - decision.charge[b];
  for (std::size_t q = 0; q < instance.wind_farms.size(); ++q)
    p[instance.wind_farms[q].bus] += wind_mw[q] - decision.curtailed_wind[q];
  return p;
}

double stage_cost(const GridInstance& instance, const StageDecision& decision,
                  int t) {
  if (decision.gen_output.size() != instance.generators.size() ||
      decision.charge.size() != instance.storage_devices.size() ||
      decision.discharge.size() != instance.storage_devices.size())
    throw std::invalid_argument("stage_cost: dimension mismatch");
  if (!finite_all(decision.gen_output))
    throw std::invalid_argument("stage_cost: non-finite decision");

  const double dt = instance.period_hours;
  double cost = 0.0;
  for (std::size_t g = 0; g < instance.generators.size(); ++g) {
    const Generator& gen = instance.generators[g];
    cost += gen.commitment[t] * gen.cost_profile[t] * decision.gen_output[g] * dt;
  }
  for (std::size_t b = 0; b < instance.storage_devices.size(); ++b) {
    const StorageDevice& dev = instance.storage_devices[b];
    cost += dev.cost[t] * (decision.charge[b] + decision.discharge[b]) * dt;
  }
  for (double u : decision.unserved) cost += instance.slack_penalty * u * dt;
  return cost;
}

std::pair<double, double> commitment_bounds(const Generator& gen, int t) {
  const bool on = gen.commitment[t] != 0;
  if (!on) return {0.0, 0.0};
  const bool newly_online = (t == 0) || (gen.commitment[t - 1] == 0);
  if (newly_online) return {gen.kappa_lo, gen.kappa_lo};
  return {gen.kappa_lo, gen.kappa_hi};
}

} // namespace gridvfa
