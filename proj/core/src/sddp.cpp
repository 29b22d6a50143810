#include "gridvfa/sddp.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace gridvfa {

namespace {

ResourceState make_resource(const GridInstance& instance,
                            std::vector<double> energy) {
  ResourceState r;
  r.storage_energy = std::move(energy);
  r.generator_output.assign(instance.generators.size(), 0.0);
  return r;
}

ResourceState initial_resource(const GridInstance& instance) {
  std::vector<double> energy;
  energy.reserve(instance.storage_devices.size());
  for (const auto& dev : instance.storage_devices)
    energy.push_back(dev.initial_energy);
  return make_resource(instance, std::move(energy));
}

double transition_weight(const ExogenousModel& model, int from, int to) {
  if (model.regime_count <= 1) return 1.0;
  return model.regime_transition[from][to];
}

/// Solve the stage-t problem inside a persistent cell. First use builds
/// the program (with all cuts attached so far) and opens the session;
/// later uses append only the cut rows added since, refresh the storage
/// right-hand sides, wind balance right-hand sides, and curtailment
/// bounds, and re-solve from the carried basis.
Solution solve_in_cell(StageSessionCell& cell, const GridInstance& instance,
                       int t, const ResourceState& resource,
                       const WindState& wind, const CutPool& cuts,
                       BasisHint* hint) {
  const bool attach = t < instance.horizon;
  if (!cell.session) {
    const VfaAttachment att = attach
                                  ? VfaAttachment::with_cuts(cuts, wind.regime)
                                  : VfaAttachment::none();
    cell.problem = build_stage(instance, t, resource, wind, att);
    cell.cuts_attached = attach ? cuts.at(t, wind.regime).size() : 0;
    cell.session.emplace(cell.problem.program);
    if (hint != nullptr) {
      const Solution adapted = hint->adapt(cell.problem.program);
      Solution sol =
          cell.session->solve(adapted.vstat.empty() ? nullptr : &adapted.vstat);
      hint->store(sol, cell.problem.program);
      return sol;
    }
    return cell.session->solve();
  }

  const StageTemplate& lay = cell.problem.layout;
  if (attach) {
    const auto& list = cuts.at(t, wind.regime);
    for (std::size_t c = cell.cuts_attached; c < list.size(); ++c) {
      const Cut& cut = list[c];
      std::vector<std::pair<int, double>> coeffs;
      coeffs.reserve(cut.slope.size() + 1);
      coeffs.emplace_back(lay.value_var, 1.0);
      for (std::size_t b = 0; b < cut.slope.size(); ++b)
        if (cut.slope[b] != 0.0)
          coeffs.emplace_back(lay.rx_start + static_cast<int>(b),
                              -cut.slope[b]);
      cell.session->append_row(RowKind::ge, coeffs, cut.intercept);
    }
    cell.cuts_attached = list.size();
  }
  for (int b = 0; b < lay.num_devices; ++b)
    cell.session->set_rhs(lay.storage_rows[b], resource.storage_energy[b]);
  for (int q = 0; q < lay.num_farms; ++q) {
    const int bus = instance.wind_farms[q].bus;
    double rhs = instance.buses[bus].load_profile[t];
    for (int q2 = 0; q2 < lay.num_farms; ++q2)
      if (instance.wind_farms[q2].bus == bus) rhs -= wind.current_wind[q2];
    cell.session->set_rhs(lay.balance_rows[bus], rhs);
    cell.session->set_variable_bounds(lay.curtail_start + q, 0.0,
                                      std::max(0.0, wind.current_wind[q]));
  }
  return cell.session->solve();
}

} // namespace

StageSolve solve_stage_with_cuts(const GridInstance& instance, int t,
                                 const ResourceState& resource,
                                 const WindState& wind, const CutPool& cuts,
                                 const std::optional<ProxTerm>& prox,
                                 BasisHint* hint) {
  const VfaAttachment att = t == instance.horizon
                                ? VfaAttachment::none()
                                : VfaAttachment::with_cuts(cuts, wind.regime);
  StageProblem sp = build_stage(instance, t, resource, wind, att, prox);
  StageSolve out;
  if (!prox && hint != nullptr) {
    out.solution = warm_solve(sp.program, hint->adapt(sp.program));
    hint->store(out.solution, sp.program);
  } else {
    out.solution = solve(sp.program);
  }
  out.layout = std::move(sp.layout);
  return out;
}

Trajectory forward_pass(const GridInstance& instance,
                        const ExogenousModel& model, const SamplePool& pool,
                        const CutPool& cuts, int k,
                        const Trajectory* prev_trajectory, double rho0,
                        Rng& rng, std::vector<BasisHint>* hints,
                        SddpWorkspace* workspace) {
  if (k < 1) throw std::invalid_argument("forward_pass: k < 1");
  const bool use_prox = rho0 > 0.0 && k >= 2 && prev_trajectory != nullptr;
  const double rho_k = rho0 / std::sqrt(static_cast<double>(k));
  const int regimes = model.regime_count;
  if (workspace != nullptr && workspace->empty())
    workspace->resize(static_cast<std::size_t>(instance.num_stages()) *
                      regimes);

  Trajectory traj;
  WindState w = model.initial_state();
  ResourceState r = initial_resource(instance);
  for (int t = 0; t <= instance.horizon; ++t) {
    Solution sol;
    const StageTemplate* lay = nullptr;
    StageTemplate owned_layout;
    // proximal solves expand the program around the previous iterate and
    // cannot reuse a plain session
    if (!use_prox && workspace != nullptr) {
      StageSessionCell& cell = (*workspace)[t * regimes + w.regime];
      BasisHint* hint =
          (!cell.session && hints) ? &(*hints)[t] : nullptr;
      sol = solve_in_cell(cell, instance, t, r, w, cuts, hint);
      lay = &cell.problem.layout;
    } else {
      std::optional<ProxTerm> prox;
      if (use_prox) {
        ProxTerm p;
        p.center = prev_trajectory->post_resource[t];
        p.rho = rho_k;
        prox = std::move(p);
      }
      BasisHint* hint = hints ? &(*hints)[t] : nullptr;
      StageSolve s = solve_stage_with_cuts(instance, t, r, w, cuts, prox, hint);
      sol = std::move(s.solution);
      owned_layout = std::move(s.layout);
      lay = &owned_layout;
    }
    if (sol.status != SolveStatus::optimal)
      throw std::runtime_error("forward pass: stage " + std::to_string(t) +
                               " solve failed");
    traj.wind.push_back(w);
    traj.post_resource.push_back(extract_post_resource(sol, *lay));
    traj.stage_costs.push_back(immediate_cost(instance, *lay, sol, t));
    r = make_resource(instance, traj.post_resource.back());
    if (t < instance.horizon) w = pool_next(model, pool, w, t, rng);
  }
  return traj;
}

void backward_pass(const GridInstance& instance, const ExogenousModel& model,
                   const SamplePool& pool, CutPool& cuts,
                   const Trajectory& trajectory, int k,
                   std::vector<BasisHint>* hints, SddpWorkspace* workspace) {
  const int devices = static_cast<int>(instance.storage_devices.size());
  const int regimes = pool.regime_count;
  SddpWorkspace local;
  SddpWorkspace& ws = workspace != nullptr ? *workspace : local;
  if (ws.empty())
    ws.resize(static_cast<std::size_t>(instance.num_stages()) * regimes);
  for (int t = instance.horizon; t >= 1; --t) {
    const std::vector<double>& rx = trajectory.post_resource[t - 1];
    const ResourceState rs = make_resource(instance, rx);

    // per successor regime: mean stage objective and mean resource duals.
    // Outcomes within one cell differ only in the wind right-hand side and
    // curtailment bounds, so the cell's persistent session serves them all.
    std::vector<double> mean_q(regimes, 0.0);
    std::vector<std::vector<double>> mean_beta(
        regimes, std::vector<double>(devices, 0.0));
    for (int rp = 0; rp < regimes; ++rp) {
      const auto& outcomes = pool.at(t, rp);
      if (outcomes.empty())
        throw std::invalid_argument("backward_pass: empty pool cell");
      StageSessionCell& cell = ws[t * regimes + rp];
      for (const auto& outcome : outcomes) {
        WindState w;
        w.current_wind = outcome;
        w.regime = rp;
        BasisHint* hint =
            (!cell.session && hints) ? &(*hints)[t * regimes + rp] : nullptr;
        const Solution sol = solve_in_cell(cell, instance, t, rs, w, cuts, hint);
        if (sol.status != SolveStatus::optimal)
          throw std::runtime_error("backward pass: stage " +
                                   std::to_string(t) + " solve failed");
        mean_q[rp] += sol.objective;
        const std::vector<double> beta =
            resource_duals(sol, cell.problem.layout);
        for (int b = 0; b < devices; ++b) mean_beta[rp][b] += beta[b];
      }
      const double inv = 1.0 / static_cast<double>(outcomes.size());
      mean_q[rp] *= inv;
      for (int b = 0; b < devices; ++b) mean_beta[rp][b] *= inv;
    }

    // one cut per predecessor regime, weighted by its transition row
    for (int r0 = 0; r0 < regimes; ++r0) {
      Cut cut;
      cut.stage = t - 1;
      cut.regime = r0;
      cut.iteration = k;
      cut.slope.assign(devices, 0.0);
      double q_bar = 0.0;
      for (int rp = 0; rp < regimes; ++rp) {
        const double w = transition_weight(model, r0, rp);
        if (w == 0.0) continue;
        q_bar += w * mean_q[rp];
        for (int b = 0; b < devices; ++b)
          cut.slope[b] += w * mean_beta[rp][b];
      }
      cut.intercept = q_bar;
      for (int b = 0; b < devices; ++b) cut.intercept -= cut.slope[b] * rx[b];
      cuts.append(std::move(cut));
    }
  }
}

double lower_bound(const GridInstance& instance, const ExogenousModel& model,
                   const CutPool& cuts, BasisHint* hint) {
  const StageSolve s =
      solve_stage_with_cuts(instance, 0, initial_resource(instance),
                            model.initial_state(), cuts, std::nullopt, hint);
  if (s.solution.status != SolveStatus::optimal)
    throw std::runtime_error("lower_bound: stage 0 solve failed");
  return s.solution.objective;
}

std::pair<double, double> estimate_upper_bound(const GridInstance& instance,
                                               const ExogenousModel& model,
                                               const SamplePool* pool,
                                               const CutPool& cuts, int paths,
                                               std::uint64_t seed) {
  const PolicyStats stats = simulate_policy(
      instance, model, pool, PolicySpec::with_cuts(cuts), paths, seed);
  return {stats.mean, stats.stderr_of_mean};
}

SddpResult run_sddp(const InstanceBundle& bundle, const SddpConfig& config) {
  const GridInstance& instance = bundle.grid;
  const ExogenousModel& model = bundle.wind_model;
  if (config.iterations < 1 || config.pool_size < 1 || config.ub_paths < 1 ||
      config.ub_every < 1)
    throw std::invalid_argument("run_sddp: invalid configuration");

  SddpResult result;
  result.pool = build_sample_pool(model, instance.horizon, config.pool_size,
                                  config.seed);
  result.cuts = CutPool(instance.horizon, model.regime_count);

  nlohmann::json echo = {{"method", "sddp"},
                         {"devices", instance.storage_devices.size()},
                         {"pool_size", config.pool_size},
                         {"iterations", config.iterations},
                         {"rho0", config.rho0},
                         {"ub_every", config.ub_every},
                         {"ub_paths", config.ub_paths},
                         {"ub_out_of_sample", config.ub_out_of_sample},
                         {"seed", config.seed}};
  result.log.method = "sddp";
  result.log.config_echo = echo.dump();
  result.log.instance_id =
      std::to_string(std::hash<std::string>{}(to_instance_text(bundle)));

  Rng path_rng(seed_mix(config.seed, 0xF02Dull));
  const int stages = instance.num_stages();
  std::vector<BasisHint> forward_hints(stages);
  std::vector<BasisHint> backward_hints(
      static_cast<std::size_t>(stages) * model.regime_count);
  // one persistent session per (stage, regime), shared by both passes:
  // everything that differs between uses is refreshed on each solve
  SddpWorkspace workspace;
  BasisHint lb_hint;
  Trajectory prev;
  bool have_prev = false;

  const auto t_start = std::chrono::steady_clock::now();
  double backward_total = 0.0;
  for (int k = 1; k <= config.iterations; ++k) {
    const Trajectory traj =
        forward_pass(instance, model, result.pool, result.cuts, k,
                     have_prev ? &prev : nullptr, config.rho0, path_rng,
                     &forward_hints, &workspace);
    const auto t_bwd = std::chrono::steady_clock::now();
    backward_pass(instance, model, result.pool, result.cuts, traj, k,
                  &backward_hints, &workspace);
    backward_total += std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_bwd)
                          .count();
    prev = traj;
    have_prev = true;

    BoundsRecord rec;
    rec.iteration = k;
    rec.lower_bound = lower_bound(instance, model, result.cuts, &lb_hint);
    rec.cuts_total = result.cuts.total();
    if (k == 1 || k == config.iterations || k % config.ub_every == 0) {
      const auto [mean, se] = estimate_upper_bound(
          instance, model,
          config.ub_out_of_sample ? nullptr : &result.pool, result.cuts,
          config.ub_paths, seed_mix(config.seed, 0xAB00ull + k));
      rec.has_ub = true;
      rec.ub_mean = mean;
      rec.ub_stderr = se;
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    rec.backward_seconds = backward_total;
    result.log.records.push_back(rec);
  }
  return result;
}

std::string cuts_to_text(const CutPool& cuts) {
  nlohmann::json doc;
  doc["horizon"] = cuts.horizon();
  doc["regime_count"] = cuts.regime_count();
  auto& list = doc["cuts"] = nlohmann::json::array();
  for (int t = 0; t <= cuts.horizon(); ++t)
    for (int r = 0; r < cuts.regime_count(); ++r)
      for (const Cut& c : cuts.at(t, r))
        list.push_back({{"stage", c.stage},
                        {"regime", c.regime},
                        {"intercept", c.intercept},
                        {"slope", c.slope},
                        {"iteration", c.iteration}});
  return doc.dump(2) + "\n";
}

CutPool cuts_from_text(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  CutPool cuts(doc.at("horizon").get<int>(),
               doc.at("regime_count").get<int>());
  for (const auto& entry : doc.at("cuts")) {
    Cut c;
    c.stage = entry.at("stage").get<int>();
    c.regime = entry.at("regime").get<int>();
    c.intercept = entry.at("intercept").get<double>();
    c.slope = entry.at("slope").get<std::vector<double>>();
    c.iteration = entry.at("iteration").get<int>();
    cuts.append(std::move(c));
  }
  return cuts;
}

} // namespace gridvfa
