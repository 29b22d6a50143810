#include "gridvfa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gridvfa/spwl.hpp"
#include "gridvfa/stage_problem.hpp"

namespace gridvfa {

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

InstanceBundle generate_instance(const InstanceSpec& spec) {
  if (spec.bus_count < 1 || spec.horizon < 1 || spec.device_count < 1 ||
      spec.generator_count < 1 || spec.wind_farm_count < 0 ||
      spec.regime_count < 1)
    throw std::invalid_argument("generate_instance: invalid spec");
  if (spec.wind_farm_count > spec.bus_count)
    throw std::invalid_argument("generate_instance: more wind farms than buses");

  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unif(rng); };

  InstanceBundle bundle;
  GridInstance& g = bundle.grid;
  const int n = spec.bus_count;
  const int stages = spec.horizon + 1;
  g.horizon = spec.horizon;
  g.period_hours = spec.period_hours;
  g.slack_penalty = spec.slack_penalty;
  g.reference_bus = 0;

  // buses with a diurnal load shape
  std::vector<double> base_load(n);
  double total_base = 0.0;
  for (int i = 0; i < n; ++i) {
    base_load[i] = uni(2.0, 10.0);
    total_base += base_load[i];
    const double phase = uni(0.0, kTwoPi);
    Bus bus;
    bus.id = i;
    bus.phase_angle_bound = 0.5;
    bus.load_profile.resize(stages);
    for (int t = 0; t < stages; ++t)
      bus.load_profile[t] =
          base_load[i] * (1.0 + 0.3 * std::sin(kTwoPi * t / stages + phase));
    g.buses.push_back(std::move(bus));
  }

  // spanning tree plus extra edges
  std::set<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) {
    const int j = static_cast<int>(rng() % i);
    edges.insert({std::min(i, j), std::max(i, j)});
  }
  const int target =
      std::max(n - 1, static_cast<int>(std::lround(spec.line_density * (n - 1))));
  for (int attempt = 0;
       static_cast<int>(edges.size()) < target && attempt < 20 * target &&
       n >= 2;
       ++attempt) {
    const int a = static_cast<int>(rng() % n);
    const int b = static_cast<int>(rng() % n);
    if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
  }
  for (const auto& [a, b] : edges) {
    TransmissionLine line;
    line.from_bus = a;
    line.to_bus = b;
    line.susceptance = uni(5.0, 15.0);
    line.flow_capacity = std::max(20.0, total_base * uni(0.15, 0.35));
    g.lines.push_back(line);
  }

  // committed generators sized to cover peak load comfortably
  const double peak_total = 1.3 * total_base;
  for (int k = 0; k < spec.generator_count; ++k) {
    Generator gen;
    gen.bus = static_cast<int>(rng() % n);
    gen.kappa_lo = 0.0;
    gen.kappa_hi =
        1.6 * peak_total / spec.generator_count * uni(0.7, 1.3);
    const double base_cost = uni(spec.gen_cost_lo, spec.gen_cost_hi);
    const double phase = uni(0.0, kTwoPi);
    gen.cost_profile.resize(stages);
    for (int t = 0; t < stages; ++t)
      gen.cost_profile[t] =
          base_cost * (1.0 + 0.2 * std::sin(kTwoPi * t / stages + phase));
    gen.commitment.assign(stages, 1);
    g.generators.push_back(std::move(gen));
  }

  // wind farms on distinct buses
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng() % (i + 1)]);
  std::vector<int> wind_buses(order.begin(),
                              order.begin() + spec.wind_farm_count);
  for (int q = 0; q < spec.wind_farm_count; ++q) {
    WindFarm farm;
    farm.bus = wind_buses[q];
    farm.max_output = 0.4 * total_base /
                      std::max(1, spec.wind_farm_count) * uni(0.7, 1.3);
    g.wind_farms.push_back(farm);
  }

  // storage: wind buses first, then the highest-load remaining buses
  std::vector<int> device_buses = wind_buses;
  {
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
      if (std::find(device_buses.begin(), device_buses.end(), i) ==
          device_buses.end())
        rest.push_back(i);
    std::sort(rest.begin(), rest.end(), [&](int a, int b) {
      if (base_load[a] != base_load[b]) return base_load[a] > base_load[b];
      return a < b;
    });
    device_buses.insert(device_buses.end(), rest.begin(), rest.end());
  }
  for (int b = 0; b < spec.device_count; ++b) {
    StorageDevice dev;
    dev.bus = device_buses[b % n]; // wrap: several devices may share a bus
    dev.cap_lo = 0.0;
    dev.cap_hi = uni(4.0, 12.0);
    dev.eta_charge = 0.92;
    dev.eta_discharge = 1.08;
    dev.cost.assign(stages, spec.storage_cost);
    dev.initial_energy = 0.5 * dev.cap_hi;
    g.storage_devices.push_back(std::move(dev));
  }

  // wind process
  ExogenousModel& m = bundle.wind_model;
  m.mode = spec.regime_count > 1 ? WindMode::markov_lag1
                                 : WindMode::stagewise_independent;
  m.noise_scale = spec.noise_scale;
  m.regime_count = spec.regime_count;
  m.initial_regime = 0;
  m.seed = seed_mix(spec.seed, 0x717Dull);
  m.max_output.resize(spec.wind_farm_count);
  for (int q = 0; q < spec.wind_farm_count; ++q)
    m.max_output[q] = g.wind_farms[q].max_output;
  m.mean.assign(stages, std::vector<double>(spec.wind_farm_count, 0.0));
  for (int q = 0; q < spec.wind_farm_count; ++q) {
    const double phase = uni(0.0, kTwoPi);
    for (int t = 0; t < stages; ++t)
      m.mean[t][q] = m.max_output[q] *
                     (0.45 + 0.25 * std::sin(kTwoPi * t / stages + phase));
  }
  if (spec.regime_count > 1) {
    m.regime_multiplier.resize(spec.regime_count);
    for (int r = 0; r < spec.regime_count; ++r)
      m.regime_multiplier[r] =
          0.75 + 0.5 * r / std::max(1, spec.regime_count - 1);
    m.regime_transition.assign(
        spec.regime_count, std::vector<double>(spec.regime_count, 0.0));
    for (int r = 0; r < spec.regime_count; ++r)
      for (int s = 0; s < spec.regime_count; ++s)
        m.regime_transition[r][s] =
            r == s ? 0.8 : 0.2 / (spec.regime_count - 1);
  } else {
    m.regime_multiplier = {1.0};
    m.regime_transition = {{1.0}};
  }

  const auto report = validate_instance(g);
  if (!report.ok())
    throw std::logic_error("generate_instance: generated instance invalid: " +
                           report.violations.front());
  return bundle;
}

namespace {

/// Offsets of one stage block inside a multi-stage LP.
struct BlockLayout {
  int gen = 0, ch = 0, dis = 0, rx = 0, th = 0, fl = 0, un = 0, sur = 0,
      cu = 0;
};

/// Append the stage-t variables and constraints. The storage balance links
/// to `parent_rx` (the previous block's post-decision variables) or, when
/// parent_rx < 0, to the devices' initial energies on the right-hand side.
BlockLayout add_stage_block(ConvexProgram& p, const GridInstance& g, int t,
                            const std::vector<double>& wind, double weight,
                            int parent_rx) {
  const int ng = static_cast<int>(g.generators.size());
  const int nb = static_cast<int>(g.storage_devices.size());
  const int nn = static_cast<int>(g.buses.size());
  const int nl = static_cast<int>(g.lines.size());
  const int nw = static_cast<int>(g.wind_farms.size());
  const double dt = g.period_hours;

  BlockLayout lay;
  lay.gen = p.num_variables();
  for (const auto& gen : g.generators) {
    const auto [lo, hi] = commitment_bounds(gen, t);
    p.add_variable(lo, hi,
                   weight * (gen.commitment[t] ? gen.cost_profile[t] * dt : 0.0));
  }
  lay.ch = p.num_variables();
  for (const auto& dev : g.storage_devices)
    p.add_variable(0.0, kInf, weight * dev.cost[t] * dt);
  lay.dis = p.num_variables();
  for (const auto& dev : g.storage_devices)
    p.add_variable(0.0, kInf, weight * dev.cost[t] * dt);
  lay.rx = p.num_variables();
  for (const auto& dev : g.storage_devices)
    p.add_variable(dev.cap_lo, dev.cap_hi, 0.0);
  lay.th = p.num_variables();
  for (int i = 0; i < nn; ++i) {
    const double bound =
        i == g.reference_bus ? 0.0 : g.buses[i].phase_angle_bound;
    p.add_variable(-bound, bound, 0.0);
  }
  lay.fl = p.num_variables();
  for (const auto& line : g.lines)
    p.add_variable(-line.flow_capacity, line.flow_capacity, 0.0);
  lay.un = p.num_variables();
  for (int i = 0; i < nn; ++i)
    p.add_variable(0.0, std::max(0.0, g.buses[i].load_profile[t]),
                   weight * g.slack_penalty * dt);
  lay.sur = p.num_variables();
  for (int i = 0; i < nn; ++i)
    p.add_variable(0.0, kInf, weight * g.slack_penalty * dt);
  lay.cu = p.num_variables();
  for (int q = 0; q < nw; ++q)
    p.add_variable(0.0, std::max(0.0, wind[q]), 0.0);

  for (int e = 0; e < nl; ++e) {
    const auto& line = g.lines[e];
    p.add_row(RowKind::eq,
              {{lay.fl + e, 1.0},
               {lay.th + line.from_bus, -line.susceptance},
               {lay.th + line.to_bus, line.susceptance}},
              0.0);
  }
  for (int i = 0; i < nn; ++i) {
    std::vector<std::pair<int, double>> coeffs;
    for (int k = 0; k < ng; ++k)
      if (g.generators[k].bus == i) coeffs.emplace_back(lay.gen + k, 1.0);
    for (int b = 0; b < nb; ++b)
      if (g.storage_devices[b].bus == i) {
        coeffs.emplace_back(lay.dis + b, 1.0);
        coeffs.emplace_back(lay.ch + b, -1.0);
      }
    for (int e = 0; e < nl; ++e) {
      if (g.lines[e].to_bus == i) coeffs.emplace_back(lay.fl + e, 1.0);
      if (g.lines[e].from_bus == i) coeffs.emplace_back(lay.fl + e, -1.0);
    }
    double rhs = g.buses[i].load_profile[t];
    for (int q = 0; q < nw; ++q)
      if (g.wind_farms[q].bus == i) {
        coeffs.emplace_back(lay.cu + q, -1.0);
        rhs -= wind[q];
      }
    coeffs.emplace_back(lay.un + i, 1.0);
    coeffs.emplace_back(lay.sur + i, -1.0);
    p.add_row(RowKind::eq, std::move(coeffs), rhs);
  }
  for (int b = 0; b < nb; ++b) {
    const auto& dev = g.storage_devices[b];
    std::vector<std::pair<int, double>> coeffs = {
        {lay.rx + b, 1.0},
        {lay.ch + b, -dev.eta_charge * dt},
        {lay.dis + b, dev.eta_discharge * dt}};
    double rhs = dev.initial_energy;
    if (parent_rx >= 0) {
      coeffs.emplace_back(parent_rx + b, -1.0);
      rhs = 0.0;
    }
    p.add_row(RowKind::eq, std::move(coeffs), rhs, b);
  }
  return lay;
}

StageDecision decode_block(const Solution& sol, const GridInstance& g,
                           const BlockLayout& lay) {
  const auto& x = sol.primal;
  auto slice = [&](int start, int count) {
    return std::vector<double>(x.data() + start, x.data() + start + count);
  };
  StageDecision d;
  d.gen_output = slice(lay.gen, static_cast<int>(g.generators.size()));
  d.charge = slice(lay.ch, static_cast<int>(g.storage_devices.size()));
  d.discharge = slice(lay.dis, static_cast<int>(g.storage_devices.size()));
  d.angles = slice(lay.th, static_cast<int>(g.buses.size()));
  d.line_flows = slice(lay.fl, static_cast<int>(g.lines.size()));
  d.unserved = slice(lay.un, static_cast<int>(g.buses.size()));
  d.curtailed_wind = slice(lay.cu, static_cast<int>(g.wind_farms.size()));
  return d;
}

} // namespace

DeterministicSolution deterministic_optimum(
    const GridInstance& instance,
    const std::vector<std::vector<double>>& wind_path) {
  if (static_cast<int>(wind_path.size()) != instance.num_stages())
    throw std::invalid_argument("deterministic_optimum: wind path length");
  ConvexProgram p;
  std::vector<BlockLayout> layouts;
  int parent_rx = -1;
  for (int t = 0; t <= instance.horizon; ++t) {
    layouts.push_back(
        add_stage_block(p, instance, t, wind_path[t], 1.0, parent_rx));
    parent_rx = layouts.back().rx;
  }
  const Solution sol = solve(p);
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error("deterministic_optimum: solve failed");

  DeterministicSolution out;
  out.objective = sol.objective;
  for (int t = 0; t <= instance.horizon; ++t) {
    out.decisions.push_back(decode_block(sol, instance, layouts[t]));
    std::vector<double> rx(instance.storage_devices.size());
    for (std::size_t b = 0; b < rx.size(); ++b)
      rx[b] = sol.primal[layouts[t].rx + static_cast<int>(b)];
    out.post_resource.push_back(std::move(rx));
  }
  return out;
}

std::vector<std::vector<double>> mean_wind_path(const ExogenousModel& model,
                                                int horizon) {
  const double mult = model.regime_multiplier.empty()
                          ? 1.0
                          : model.regime_multiplier[model.initial_regime];
  std::vector<std::vector<double>> path(horizon + 1);
  for (int t = 0; t <= horizon; ++t) {
    path[t].resize(model.max_output.size());
    for (std::size_t q = 0; q < model.max_output.size(); ++q)
      path[t][q] =
          std::clamp(model.mean[t][q] * mult, 0.0, model.max_output[q]);
  }
  return path;
}

double ValueTables::interpolate(int t,
                                const std::vector<double>& resource) const {
  const int devices = static_cast<int>(levels.size());
  // multilinear interpolation over the per-device grids
  std::vector<int> lo(devices);
  std::vector<double> frac(devices);
  for (int b = 0; b < devices; ++b) {
    const auto& lv = levels[b];
    const double r =
        std::clamp(resource[b], lv.front(), lv.back());
    const double step = (lv.back() - lv.front()) / (grid_points - 1);
    int i = step > 0 ? static_cast<int>((r - lv.front()) / step) : 0;
    i = std::clamp(i, 0, grid_points - 2);
    lo[b] = i;
    frac[b] = step > 0 ? (r - lv[i]) / step : 0.0;
  }
  double acc = 0.0;
  const int corners = 1 << devices;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    int idx = 0, stride = 1;
    for (int b = 0; b < devices; ++b) {
      const bool hi = (c >> b) & 1;
      w *= hi ? frac[b] : 1.0 - frac[b];
      idx += (lo[b] + (hi ? 1 : 0)) * stride;
      stride *= grid_points;
    }
    acc += w * value[t][idx];
  }
  return acc;
}

ValueTables brute_force_dp(const GridInstance& instance,
                           const ExogenousModel& model,
                           const SamplePool& pool, int grid_points) {
  const int devices = static_cast<int>(instance.storage_devices.size());
  const int T = instance.horizon;
  if (devices < 1 || devices > 2 || T > 3 || pool.pool_size > 3 ||
      pool.regime_count != 1 || grid_points < 2)
    throw std::invalid_argument("brute_force_dp: size guard violated");

  ValueTables tables;
  tables.grid_points = grid_points;
  tables.levels.resize(devices);
  for (int b = 0; b < devices; ++b) {
    const auto& dev = instance.storage_devices[b];
    tables.levels[b].resize(grid_points);
    for (int i = 0; i < grid_points; ++i)
      tables.levels[b][i] =
          dev.cap_lo +
          (dev.cap_hi - dev.cap_lo) * i / (grid_points - 1);
  }
  const int states = devices == 1 ? grid_points : grid_points * grid_points;
  tables.value.assign(T + 1, std::vector<double>(states, 0.0));

  const WindState w0 = model.initial_state();

  // stage optimum at one grid state under one outcome, with the stage-(t+1)
  // table as terminal value
  SeparableVFA next_vfa; // 1-device continuous embedding
  const auto stage_value = [&](int t, const std::vector<double>& r,
                               const std::vector<double>& wind) {
    ResourceState rs;
    rs.storage_energy = r;
    rs.generator_output.assign(instance.generators.size(), 0.0);
    WindState w;
    w.current_wind = wind;
    w.regime = 0;
    if (t == T) {
      auto sp = build_stage(instance, t, rs, w, VfaAttachment::none());
      const Solution sol = solve(sp.program);
      if (sol.status != SolveStatus::optimal)
        throw std::runtime_error("brute_force_dp: stage solve failed");
      return sol.objective;
    }
    if (devices == 1) {
      auto sp = build_stage(instance, t, rs, w,
                            VfaAttachment::with_spwl(next_vfa));
      const Solution sol = solve(sp.program);
      if (sol.status != SolveStatus::optimal)
        throw std::runtime_error("brute_force_dp: stage solve failed");
      // the PWL embedding is anchored at zero at cap_lo; restore the constant
      return sol.objective + tables.value[t + 1][0];
    }
    // two devices: restrict the post-decision state to the grid (an upward-
    // biased but valid table for under-estimation checks)
    double best = kInf;
    auto sp = build_stage(instance, t, rs, w, VfaAttachment::none());
    for (int idx = 0; idx < states; ++idx) {
      const double g0 = tables.levels[0][idx % grid_points];
      const double g1 = tables.levels[1][idx / grid_points];
      ConvexProgram p = sp.program;
      p.lo[sp.layout.rx_start] = p.hi[sp.layout.rx_start] = g0;
      p.lo[sp.layout.rx_start + 1] = p.hi[sp.layout.rx_start + 1] = g1;
      const Solution sol = solve(p);
      if (sol.status != SolveStatus::optimal) continue;
      best = std::min(best, sol.objective + tables.value[t + 1][idx]);
    }
    if (!std::isfinite(best))
      throw std::runtime_error("brute_force_dp: no feasible grid target");
    return best;
  };

  for (int t = T; t >= 0; --t) {
    if (devices == 1 && t < T) {
      // embed the stage-(t+1) table as a convex piecewise-linear function
      next_vfa = SeparableVFA::zero(instance, grid_points - 1);
      const double width = next_vfa.segment_width(instance, 0);
      std::vector<double> slopes(grid_points - 1);
      for (int i = 0; i + 1 < grid_points; ++i)
        slopes[i] =
            (tables.value[t + 1][i + 1] - tables.value[t + 1][i]) / width;
      next_vfa.slopes[t][0] = convexity_projection(
          slopes, std::vector<double>(slopes.size(), 1.0));
    }
    for (int idx = 0; idx < states; ++idx) {
      std::vector<double> r(devices);
      r[0] = tables.levels[0][idx % grid_points];
      if (devices == 2) r[1] = tables.levels[1][idx / grid_points];
      double v = 0.0;
      if (t == 0) {
        v = stage_value(0, r, w0.current_wind);
      } else {
        const auto& cell = pool.at(t, 0);
        for (const auto& outcome : cell) v += stage_value(t, r, outcome);
        v /= static_cast<double>(cell.size());
      }
      tables.value[t][idx] = v;
    }
  }
  return tables;
}

double extensive_form_optimum(const GridInstance& instance,
                              const ExogenousModel& model,
                              const SamplePool& pool) {
  const int T = instance.horizon;
  if (pool.regime_count != 1)
    throw std::invalid_argument("extensive_form_optimum: single regime only");
  double paths = 1.0;
  for (int t = 1; t <= T; ++t) paths *= pool.pool_size;
  if (paths > 64.0)
    throw std::invalid_argument("extensive_form_optimum: too many paths");

  ConvexProgram p;
  const WindState w0 = model.initial_state();
  // level-by-level tree construction; a node carries its rx offset
  std::vector<int> level_rx = {
      add_stage_block(p, instance, 0, w0.current_wind, 1.0, -1).rx};
  double prob = 1.0;
  for (int t = 1; t <= T; ++t) {
    prob /= pool.pool_size;
    std::vector<int> next_rx;
    next_rx.reserve(level_rx.size() * pool.pool_size);
    for (int parent : level_rx)
      for (const auto& outcome : pool.at(t, 0))
        next_rx.push_back(
            add_stage_block(p, instance, t, outcome, prob, parent).rx);
    level_rx = std::move(next_rx);
  }
  const Solution sol = solve(p);
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error("extensive_form_optimum: solve failed");
  return sol.objective;
}

RunLog run_myopic(const InstanceBundle& bundle, int paths,
                  std::uint64_t seed) {
  const PolicyStats stats =
      simulate_policy(bundle.grid, bundle.wind_model, nullptr,
                      PolicySpec::myopic(), paths, seed);
  RunLog log;
  log.method = "myopic";
  nlohmann::json echo = {{"method", "myopic"},
                         {"devices", bundle.grid.storage_devices.size()},
                         {"paths", paths},
                         {"seed", seed}};
  log.config_echo = echo.dump();
  log.instance_id =
      std::to_string(std::hash<std::string>{}(to_instance_text(bundle)));
  BoundsRecord rec;
  rec.iteration = 0;
  rec.has_lb = false;
  rec.has_ub = true;
  rec.ub_mean = stats.mean;
  rec.ub_stderr = stats.stderr_of_mean;
  log.records.push_back(rec);
  log.has_final_policy = true;
  log.final_policy = stats;
  return log;
}

RunLog run_deterministic(const InstanceBundle& bundle) {
  const auto path = mean_wind_path(bundle.wind_model, bundle.grid.horizon);
  const DeterministicSolution det = deterministic_optimum(bundle.grid, path);
  RunLog log;
  log.method = "deterministic";
  nlohmann::json echo = {{"method", "deterministic"},
                         {"devices", bundle.grid.storage_devices.size()}};
  log.config_echo = echo.dump();
  log.instance_id =
      std::to_string(std::hash<std::string>{}(to_instance_text(bundle)));
  BoundsRecord rec;
  rec.iteration = 0;
  rec.lower_bound = det.objective;
  rec.has_ub = true;
  rec.ub_mean = det.objective;
  rec.ub_stderr = 0.0;
  log.records.push_back(rec);
  return log;
}

namespace {

struct LogSummary {
  bool has_lb = false;
  double lb = 0.0;
  bool has_ub = false;
  double ub = 0.0;
  double ub_stderr = 0.0;
};

LogSummary summarize(const RunLog& log) {
  LogSummary s;
  for (const auto& r : log.records) {
    if (r.has_lb) {
      s.has_lb = true;
      s.lb = r.lower_bound;
    }
    if (r.has_ub) {
      s.has_ub = true;
      s.ub = r.ub_mean;
      s.ub_stderr = r.ub_stderr;
    }
  }
  if (log.has_final_policy) {
    s.has_ub = true;
    s.ub = log.final_policy.mean;
    s.ub_stderr = log.final_policy.stderr_of_mean;
  }
  return s;
}

std::string echo_field(const RunLog& log, const char* key) {
  const auto doc = nlohmann::json::parse(log.config_echo, nullptr, false);
  if (doc.is_discarded() || !doc.contains(key)) return "";
  const auto& v = doc.at(key);
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return "";
}

} // namespace

CompareReport compare_report(const std::vector<RunLog>& logs) {
  if (logs.empty())
    throw std::invalid_argument("compare_report: no logs");
  for (const auto& log : logs)
    if (log.instance_id != logs.front().instance_id)
      throw std::invalid_argument(
          "compare_report: logs reference different instances");

  CompareReport report;
  {
    std::ostringstream os;
    os << "method,iteration,lower_bound,ub_mean,ub_stderr,cuts_total\n";
    for (const auto& log : logs)
      for (const auto& r : log.records) {
        os << log.method << ',' << r.iteration << ',';
        if (r.has_lb) os << format_number(r.lower_bound);
        os << ',';
        if (r.has_ub)
          os << format_number(r.ub_mean) << ',' << format_number(r.ub_stderr);
        else
          os << ',';
        os << ',' << r.cuts_total << '\n';
      }
    report.bounds_csv = os.str();
  }
  {
    // terminal gaps, normalized both ways
    bool have_myopic = false;
    double myopic_mean = 0.0;
    for (const auto& log : logs)
      if (log.method == "myopic") {
        const LogSummary s = summarize(log);
        if (s.has_ub) {
          have_myopic = true;
          myopic_mean = s.ub;
        }
      }
    std::ostringstream os;
    os << "method,lower_bound,ub_mean,raw_gap,myopic_adjusted_gap\n";
    for (const auto& log : logs) {
      const LogSummary s = summarize(log);
      os << log.method << ',';
      os << (s.has_lb ? format_number(s.lb) : "n/a") << ',';
      os << (s.has_ub ? format_number(s.ub) : "n/a") << ',';
      if (s.has_lb && s.has_ub && s.lb != 0.0)
        os << format_number((s.ub - s.lb) / s.lb);
      else
        os << "n/a";
      os << ',';
      if (s.has_lb && s.has_ub && have_myopic && myopic_mean != s.lb)
        os << format_number((s.ub - s.lb) / (myopic_mean - s.lb));
      else
        os << "n/a";
      os << '\n';
    }
    report.gap_csv = os.str();
  }
  {
    std::ostringstream os;
    os << "method,devices,pool_size,iterations,total_wall_seconds,"
          "seconds_per_iteration,backward_seconds_per_iteration\n";
    for (const auto& log : logs) {
      if (log.records.empty()) continue;
      const auto& last = log.records.back();
      const int iters = std::max(1, last.iteration);
      os << log.method << ',' << echo_field(log, "devices") << ','
         << echo_field(log, "pool_size") << ',' << last.iteration << ','
         << format_number(last.wall_seconds) << ','
         << format_number(last.wall_seconds / iters) << ','
         << format_number(last.backward_seconds / iters) << '\n';
    }
    report.timing_csv = os.str();
  }
  {
    // sampled-model study: SDDP runs grouped by pool size
    std::vector<std::pair<long long, const RunLog*>> rows;
    for (const auto& log : logs)
      if (log.method == "sddp") {
        const std::string ps = echo_field(log, "pool_size");
        if (!ps.empty()) rows.emplace_back(std::stoll(ps), &log);
      }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream os;
    os << "pool_size,lower_bound,ub_mean,ub_stderr\n";
    for (const auto& [ps, log] : rows) {
      const LogSummary s = summarize(*log);
      os << ps << ',' << (s.has_lb ? format_number(s.lb) : "n/a") << ','
         << (s.has_ub ? format_number(s.ub) : "n/a") << ','
         << (s.has_ub ? format_number(s.ub_stderr) : "n/a") << '\n';
    }
    report.sampled_csv = os.str();
  }
  return report;
}

} // namespace gridvfa
