#include "gridvfa/stage_problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gridvfa {

namespace {
constexpr double kBoundTol = 1e-6;
} // namespace

int epigraph_of_cuts(ConvexProgram& program, const std::vector<int>& rx_vars,
                     const std::vector<Cut>& cuts, double lower_floor) {
  const int v = program.add_variable(lower_floor, kInf, 1.0);
  const int devices = static_cast<int>(rx_vars.size());
  for (const Cut& cut : cuts) {
    if (static_cast<int>(cut.slope.size()) != devices)
      throw std::invalid_argument("cut slope dimension mismatch");
    std::vector<std::pair<int, double>> coeffs;
    coeffs.reserve(devices + 1);
    coeffs.emplace_back(v, 1.0);
    for (int b = 0; b < devices; ++b) {
      if (!std::isfinite(cut.slope[b]) || !std::isfinite(cut.intercept))
        throw std::invalid_argument("non-finite cut coefficient");
      if (cut.slope[b] != 0.0) coeffs.emplace_back(rx_vars[b], -cut.slope[b]);
    }
    program.add_row(RowKind::ge, std::move(coeffs), cut.intercept);
  }
  return v;
}

std::vector<int> epigraph_of_spwl(ConvexProgram& program,
                                  const GridInstance& instance,
                                  const SeparableVFA& vfa, int t,
                                  const std::vector<int>& rx_vars) {
  const int devices = static_cast<int>(instance.storage_devices.size());
  if (t < 0 || t >= static_cast<int>(vfa.slopes.size()))
    throw std::invalid_argument("spwl: stage out of range");
  if (static_cast<int>(vfa.slopes[t].size()) != devices)
    throw std::invalid_argument("spwl: device count mismatch");
  std::vector<int> z_start(devices, -1);
  for (int b = 0; b < devices; ++b) {
    const auto& slopes = vfa.slopes[t][b];
    for (std::size_t s = 1; s < slopes.size(); ++s)
      if (slopes[s] < slopes[s - 1])
        throw std::invalid_argument("spwl: non-convex slope sequence");
    const auto& dev = instance.storage_devices[b];
    const double width = (dev.cap_hi - dev.cap_lo) / vfa.segments;
    std::vector<std::pair<int, double>> coeffs;
    coeffs.reserve(slopes.size() + 1);
    coeffs.emplace_back(rx_vars[b], 1.0);
    for (double slope : slopes) {
      const int z = program.add_variable(0.0, width, slope);
      if (z_start[b] < 0) z_start[b] = z;
      coeffs.emplace_back(z, -1.0);
    }
    program.add_row(RowKind::eq, std::move(coeffs), dev.cap_lo);
  }
  return z_start;
}

StageProblem build_stage(const GridInstance& instance, int t,
                         const ResourceState& resource, const WindState& wind,
                         const VfaAttachment& vfa,
                         const std::optional<ProxTerm>& prox) {
  const int ng = static_cast<int>(instance.generators.size());
  const int nb = static_cast<int>(instance.storage_devices.size());
  const int nn = static_cast<int>(instance.buses.size());
  const int nl = static_cast<int>(instance.lines.size());
  const int nw = static_cast<int>(instance.wind_farms.size());
  const double dt = instance.period_hours;

  if (t < 0 || t > instance.horizon)
    throw std::invalid_argument("build_stage: stage out of range");
  if (t == instance.horizon && vfa.kind != VfaAttachment::Kind::none)
    throw std::invalid_argument(
        "build_stage: terminal stage takes no value function");
  if (static_cast<int>(resource.storage_energy.size()) != nb)
    throw std::invalid_argument("build_stage: resource dimension mismatch");
  if (static_cast<int>(wind.current_wind.size()) != nw)
    throw std::invalid_argument("build_stage: wind dimension mismatch");
  for (int b = 0; b < nb; ++b) {
    const auto& dev = instance.storage_devices[b];
    const double r = resource.storage_energy[b];
    if (r < dev.cap_lo - kBoundTol || r > dev.cap_hi + kBoundTol)
      throw std::invalid_argument("build_stage: resource out of bounds for device " +
                                  std::to_string(b));
  }

  StageProblem sp;
  ConvexProgram& p = sp.program;
  StageTemplate& lay = sp.layout;
  lay.t = t;
  lay.num_generators = ng;
  lay.num_devices = nb;
  lay.num_buses = nn;
  lay.num_lines = nl;
  lay.num_farms = nw;

  lay.gen_start = p.num_variables();
  for (const auto& gen : instance.generators) {
    const auto [lo, hi] = commitment_bounds(gen, t);
    const double cost = gen.commitment[t] ? gen.cost_profile[t] * dt : 0.0;
    p.add_variable(lo, hi, cost);
  }
  lay.charge_start = p.num_variables();
  for (const auto& dev : instance.storage_devices)
    p.add_variable(0.0, kInf, dev.cost[t] * dt);
  lay.discharge_start = p.num_variables();
  for (const auto& dev : instance.storage_devices)
    p.add_variable(0.0, kInf, dev.cost[t] * dt);
  lay.rx_start = p.num_variables();
  for (const auto& dev : instance.storage_devices)
    p.add_variable(dev.cap_lo, dev.cap_hi, 0.0);
  lay.angle_start = p.num_variables();
  for (int i = 0; i < nn; ++i) {
    const double bound =
        i == instance.reference_bus ? 0.0 : instance.buses[i].phase_angle_bound;
    p.add_variable(-bound, bound, 0.0);
  }
  lay.flow_start = p.num_variables();
  for (const auto& line : instance.lines)
    p.add_variable(-line.flow_capacity, line.flow_capacity, 0.0);
  lay.unserved_start = p.num_variables();
  for (int i = 0; i < nn; ++i)
    p.add_variable(0.0, std::max(0.0, instance.buses[i].load_profile[t]),
                   instance.slack_penalty * dt);
  lay.surplus_start = p.num_variables();
  for (int i = 0; i < nn; ++i)
    p.add_variable(0.0, kInf, instance.slack_penalty * dt);
  lay.curtail_start = p.num_variables();
  for (int q = 0; q < nw; ++q)
    p.add_variable(0.0, std::max(0.0, wind.current_wind[q]), 0.0);

  // DC flow definition: f_e - B_e (theta_from - theta_to) = 0.
  for (int e = 0; e < nl; ++e) {
    const auto& line = instance.lines[e];
    lay.flow_rows.push_back(p.add_row(
        RowKind::eq,
        {{lay.flow_start + e, 1.0},
         {lay.angle_start + line.from_bus, -line.susceptance},
         {lay.angle_start + line.to_bus, line.susceptance}},
        0.0));
  }

  // Nodal balance: injections + net inflow + unserved - surplus = load - wind.
  for (int i = 0; i < nn; ++i) {
    std::vector<std::pair<int, double>> coeffs;
    for (int g = 0; g < ng; ++g)
      if (instance.generators[g].bus == i)
        coeffs.emplace_back(lay.gen_start + g, 1.0);
    for (int b = 0; b < nb; ++b)
      if (instance.storage_devices[b].bus == i) {
        coeffs.emplace_back(lay.discharge_start + b, 1.0);
        coeffs.emplace_back(lay.charge_start + b, -1.0);
      }
    for (int e = 0; e < nl; ++e) {
      if (instance.lines[e].to_bus == i)
        coeffs.emplace_back(lay.flow_start + e, 1.0);
      if (instance.lines[e].from_bus == i)
        coeffs.emplace_back(lay.flow_start + e, -1.0);
    }
    double rhs = instance.buses[i].load_profile[t];
    for (int q = 0; q < nw; ++q)
      if (instance.wind_farms[q].bus == i) {
        coeffs.emplace_back(lay.curtail_start + q, -1.0);
        rhs -= wind.current_wind[q];
      }
    coeffs.emplace_back(lay.unserved_start + i, 1.0);
    coeffs.emplace_back(lay.surplus_start + i, -1.0);
    lay.balance_rows.push_back(p.add_row(RowKind::eq, std::move(coeffs), rhs));
  }

  // Storage balance (tagged): R^x - eta_c dt charge + eta_d dt discharge = R.
  for (int b = 0; b < nb; ++b) {
    const auto& dev = instance.storage_devices[b];
    lay.storage_rows.push_back(p.add_row(
        RowKind::eq,
        {{lay.rx_start + b, 1.0},
         {lay.charge_start + b, -dev.eta_charge * dt},
         {lay.discharge_start + b, dev.eta_discharge * dt}},
        resource.storage_energy[b], /*tag=*/b));
  }

  std::vector<int> rx_vars(nb);
  for (int b = 0; b < nb; ++b) rx_vars[b] = lay.rx_start + b;
  switch (vfa.kind) {
    case VfaAttachment::Kind::none:
      break;
    case VfaAttachment::Kind::cuts:
      if (vfa.pool == nullptr)
        throw std::invalid_argument("build_stage: cuts attachment without pool");
      lay.value_var = epigraph_of_cuts(p, rx_vars, vfa.pool->at(t, vfa.regime),
                                       vfa.lower_floor);
      break;
    case VfaAttachment::Kind::spwl:
      if (vfa.vfa == nullptr)
        throw std::invalid_argument("build_stage: spwl attachment without vfa");
      lay.spwl_z_start = epigraph_of_spwl(p, instance, *vfa.vfa, t, rx_vars);
      break;
  }

  if (prox && prox->rho > 0.0) {
    if (static_cast<int>(prox->center.size()) != nb)
      throw std::invalid_argument("build_stage: prox center dimension mismatch");
    std::vector<std::pair<int, double>> centers;
    centers.reserve(nb);
    for (int b = 0; b < nb; ++b)
      centers.emplace_back(rx_vars[b], prox->center[b]);
    p.set_proximal(prox->rho, std::move(centers));
  }
  return sp;
}

std::vector<double> resource_duals(const Solution& solution,
                                   const StageTemplate& layout) {
  if (solution.status != SolveStatus::optimal)
    throw std::invalid_argument("resource_duals: solution not optimal");
  std::vector<double> beta;
  beta.reserve(layout.storage_rows.size());
  for (int row : layout.storage_rows) beta.push_back(solution.row_duals[row]);
  return beta;
}

StageDecision extract_decision(const Solution& solution,
                               const StageTemplate& layout) {
  const auto& x = solution.primal;
  StageDecision d;
  auto slice = [&](int start, int n) {
    return std::vector<double>(x.data() + start, x.data() + start + n);
  };
  d.gen_output = slice(layout.gen_start, layout.num_generators);
  d.charge = slice(layout.charge_start, layout.num_devices);
  d.discharge = slice(layout.discharge_start, layout.num_devices);
  d.angles = slice(layout.angle_start, layout.num_buses);
  d.line_flows = slice(layout.flow_start, layout.num_lines);
  d.unserved = slice(layout.unserved_start, layout.num_buses);
  d.curtailed_wind = slice(layout.curtail_start, layout.num_farms);
  return d;
}

std::vector<double> extract_post_resource(const Solution& solution,
                                          const StageTemplate& layout) {
  std::vector<double> rx(layout.num_devices);
  for (int b = 0; b < layout.num_devices; ++b)
    rx[b] = solution.primal[layout.rx_start + b];
  return rx;
}

double immediate_cost(const GridInstance& instance,
                      const StageTemplate& layout, const Solution& solution,
                      int t) {
  const StageDecision d = extract_decision(solution, layout);
  double cost = stage_cost(instance, d, t);
  for (int i = 0; i < layout.num_buses; ++i)
    cost += instance.slack_penalty * instance.period_hours *
            solution.primal[layout.surplus_start + i];
  return cost;
}

} // namespace gridvfa
