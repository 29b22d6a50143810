#include "gridvfa/policy.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "gridvfa/stage_problem.hpp"

namespace gridvfa {

double Trajectory::total_cost() const {
  return std::accumulate(stage_costs.begin(), stage_costs.end(), 0.0);
}

namespace {

ResourceState initial_resource(const GridInstance& instance) {
  ResourceState r;
  r.storage_energy.reserve(instance.storage_devices.size());
  for (const auto& dev : instance.storage_devices)
    r.storage_energy.push_back(dev.initial_energy);
  r.generator_output.assign(instance.generators.size(), 0.0);
  return r;
}

VfaAttachment attachment_for(const PolicySpec& policy, int t, int horizon,
                             int regime) {
  if (t == horizon) return VfaAttachment::none();
  switch (policy.kind) {
    case PolicySpec::Kind::myopic: return VfaAttachment::none();
    case PolicySpec::Kind::cuts:
      return VfaAttachment::with_cuts(*policy.cuts, regime);
    case PolicySpec::Kind::vfa: return VfaAttachment::with_spwl(*policy.vfa);
  }
  return VfaAttachment::none();
}

} // namespace

namespace {

/// Per-(stage, regime) LP kept alive across paths: successive paths only
/// move the storage right-hand sides, the wind injection, and the
/// curtailment bounds, so each stage re-solves from its previous basis.
struct StageEval {
  StageProblem sp;
  std::optional<ResolveSession> session;
};

double run_path(const GridInstance& instance, const ExogenousModel& model,
                const SamplePool* pool, const PolicySpec& policy,
                std::uint64_t path_seed, std::vector<StageEval>* evals,
                int regimes) {
  Rng rng(path_seed);
  WindState w = model.initial_state();
  ResourceState r = initial_resource(instance);
  const int farms = static_cast<int>(instance.wind_farms.size());
  double total = 0.0;
  StageProblem scratch;
  for (int t = 0; t <= instance.horizon; ++t) {
    Solution sol;
    const StageTemplate* layout = nullptr;
    StageEval* ev =
        evals ? &(*evals)[static_cast<std::size_t>(t) * regimes + w.regime]
              : nullptr;
    if (ev == nullptr || !ev->session) {
      const VfaAttachment att =
          attachment_for(policy, t, instance.horizon, w.regime);
      StageProblem sp = build_stage(instance, t, r, w, att);
      if (ev != nullptr) {
        ev->sp = std::move(sp);
        ev->session.emplace(ev->sp.program);
        sol = ev->session->solve();
        layout = &ev->sp.layout;
      } else {
        sol = solve(sp.program);
        scratch = std::move(sp);
        layout = &scratch.layout;
      }
    } else {
      const StageTemplate& lay = ev->sp.layout;
      for (std::size_t b = 0; b < r.storage_energy.size(); ++b)
        ev->session->set_rhs(lay.storage_rows[b], r.storage_energy[b]);
      for (int q = 0; q < farms; ++q) {
        const int bus = instance.wind_farms[q].bus;
        double rhs = instance.buses[bus].load_profile[t];
        for (int q2 = 0; q2 < farms; ++q2)
          if (instance.wind_farms[q2].bus == bus) rhs -= w.current_wind[q2];
        ev->session->set_rhs(lay.balance_rows[bus], rhs);
        ev->session->set_variable_bounds(lay.curtail_start + q, 0.0,
                                         std::max(0.0, w.current_wind[q]));
      }
      sol = ev->session->solve();
      layout = &lay;
    }
    if (sol.status != SolveStatus::optimal)
      throw std::runtime_error("policy simulation: stage " +
                               std::to_string(t) + " solve failed");
    total += immediate_cost(instance, *layout, sol, t);
    r.storage_energy = extract_post_resource(sol, *layout);
    if (t < instance.horizon)
      w = pool ? pool_next(model, *pool, w, t, rng)
               : sample_next(model, w, t, rng);
  }
  return total;
}

} // namespace

double simulate_one_path(const GridInstance& instance,
                         const ExogenousModel& model, const SamplePool* pool,
                         const PolicySpec& policy, std::uint64_t path_seed) {
  return run_path(instance, model, pool, policy, path_seed, nullptr,
                  model.regime_count);
}

std::vector<double> simulate_policy_costs(const GridInstance& instance,
                                          const ExogenousModel& model,
                                          const SamplePool* pool,
                                          const PolicySpec& policy, int paths,
                                          std::uint64_t seed) {
  if (paths < 1) throw std::invalid_argument("simulate_policy: paths < 1");
  const int regimes = std::max(1, model.regime_count);
  std::vector<StageEval> evals(
      static_cast<std::size_t>(instance.horizon + 1) * regimes);
  std::vector<double> costs;
  costs.reserve(paths);
  for (int p = 0; p < paths; ++p)
    costs.push_back(run_path(instance, model, pool, policy, seed_mix(seed, p),
                             &evals, regimes));
  return costs;
}

PolicyStats simulate_policy(const GridInstance& instance,
                            const ExogenousModel& model,
                            const SamplePool* pool, const PolicySpec& policy,
                            int paths, std::uint64_t seed) {
  const std::vector<double> costs =
      simulate_policy_costs(instance, model, pool, policy, paths, seed);
  PolicyStats stats;
  stats.paths = paths;
  double sum = 0.0, sumsq = 0.0;
  for (int p = 0; p < paths; ++p) {
    const double cost = costs[p];
    sum += cost;
    sumsq += cost * cost;
    if (p == 0 || cost < stats.min) stats.min = cost;
    if (p == 0 || cost > stats.max) stats.max = cost;
  }
  stats.mean = sum / paths;
  if (paths >= 2) {
    const double var =
        std::max(0.0, (sumsq - paths * stats.mean * stats.mean) / (paths - 1));
    stats.stderr_of_mean = std::sqrt(var / paths);
  }
  return stats;
}

} // namespace gridvfa
