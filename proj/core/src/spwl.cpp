#include "gridvfa/spwl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gridvfa/stage_problem.hpp"

namespace gridvfa {

SeparableVFA SeparableVFA::zero(const GridInstance& instance, int segments) {
  if (segments < 1) throw std::invalid_argument("SeparableVFA: segments < 1");
  SeparableVFA vfa;
  vfa.segments = segments;
  const int stages = instance.num_stages();
  const int devices = static_cast<int>(instance.storage_devices.size());
  vfa.slopes.assign(stages, std::vector<std::vector<double>>(
                                devices, std::vector<double>(segments, 0.0)));
  vfa.update_counts.assign(
      stages,
      std::vector<std::vector<int>>(devices, std::vector<int>(segments, 0)));
  return vfa;
}

double SeparableVFA::evaluate(const GridInstance& instance, int t, int device,
                              double r) const {
  const auto& dev = instance.storage_devices[device];
  const double width = segment_width(instance, device);
  double remaining = r - dev.cap_lo;
  if (remaining < -1e-9 || remaining > dev.cap_hi - dev.cap_lo + 1e-9)
    throw std::invalid_argument("SeparableVFA::evaluate: r out of range");
  double value = 0.0;
  for (double slope : slopes[t][device]) {
    const double fill = std::clamp(remaining, 0.0, width);
    value += slope * fill;
    remaining -= fill;
    if (remaining <= 0.0) break;
  }
  return value;
}

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

VfaAttachment vfa_attachment(const GridInstance& instance,
                             const SeparableVFA& vfa, int t) {
  return t == instance.horizon ? VfaAttachment::none()
                               : VfaAttachment::with_spwl(vfa);
}

/// Derivatives for every device from one base solve plus warm re-solves of
/// the same program with a shifted storage-row right-hand side.
std::vector<NumericalDerivative> stage_derivatives(
    const GridInstance& instance, int t, const ResourceState& resource,
    const WindState& wind, const SeparableVFA& vfa,
    const std::vector<double>& deltas, BasisHint* hint) {
  const int devices = static_cast<int>(instance.storage_devices.size());
  StageProblem sp =
      build_stage(instance, t, resource, wind, vfa_attachment(instance, vfa, t));
  ResolveSession session(sp.program);
  Solution base;
  if (hint != nullptr) {
    const Solution adapted = hint->adapt(sp.program);
    base = session.solve(adapted.vstat.empty() ? nullptr : &adapted.vstat);
    hint->store(base, sp.program);
  } else {
    base = session.solve();
  }
  if (base.status != SolveStatus::optimal)
    throw std::runtime_error("numerical derivative: stage " +
                             std::to_string(t) + " base solve failed");

  std::vector<NumericalDerivative> out(devices);
  for (int m = 0; m < devices; ++m) {
    const auto& dev = instance.storage_devices[m];
    const double r = resource.storage_energy[m];
    const double delta = deltas[m];
    if (delta <= 0.0)
      throw std::invalid_argument("numerical derivative: delta <= 0");
    const int row = sp.layout.storage_rows[m];
    const double rhs0 = sp.program.rows[row].rhs;

    auto perturbed = [&](double shifted) {
      session.set_rhs(row, shifted);
      const Solution sol = session.solve();
      session.set_rhs(row, rhs0);
      if (sol.status != SolveStatus::optimal)
        throw std::runtime_error("numerical derivative: perturbed solve failed");
      return sol.objective;
    };

    if (r + delta <= dev.cap_hi + 1e-12) {
      out[m].has_plus = true;
      out[m].plus = (perturbed(r + delta) - base.objective) / delta;
    }
    if (r - delta >= dev.cap_lo - 1e-12) {
      out[m].has_minus = true;
      out[m].minus = (base.objective - perturbed(r - delta)) / delta;
    }
  }
  return out;
}

std::vector<double> default_deltas(const GridInstance& instance,
                                   const SeparableVFA& vfa, double delta) {
  std::vector<double> d(instance.storage_devices.size());
  for (std::size_t m = 0; m < d.size(); ++m)
    d[m] = delta > 0.0 ? delta
                       : vfa.segment_width(instance, static_cast<int>(m));
  return d;
}

} // namespace

Trajectory adp_forward_pass(const GridInstance& instance,
                            const ExogenousModel& model,
                            const SeparableVFA& vfa, Rng& rng,
                            std::vector<BasisHint>* hints) {
  Trajectory traj;
  WindState w = model.initial_state();
  ResourceState r = initial_resource(instance);
  for (int t = 0; t <= instance.horizon; ++t) {
    auto sp =
        build_stage(instance, t, r, w, vfa_attachment(instance, vfa, t));
    Solution sol;
    if (hints != nullptr) {
      BasisHint& hint = (*hints)[t];
      sol = warm_solve(sp.program, hint.adapt(sp.program));
      hint.store(sol, sp.program);
    } else {
      sol = solve(sp.program);
    }
    if (sol.status != SolveStatus::optimal)
      throw std::runtime_error("forward pass: stage " + std::to_string(t) +
                               " solve failed");
    traj.wind.push_back(w);
    traj.post_resource.push_back(extract_post_resource(sol, sp.layout));
    traj.stage_costs.push_back(immediate_cost(instance, sp.layout, sol, t));
    r = make_resource(instance, traj.post_resource.back());
    if (t < instance.horizon) w = sample_next(model, w, t, rng);
  }
  return traj;
}

NumericalDerivative numerical_derivative(const GridInstance& instance, int t,
                                         const ResourceState& resource,
                                         const WindState& wind,
                                         const SeparableVFA& vfa, int device,
                                         double delta) {
  std::vector<double> deltas(instance.storage_devices.size(), delta);
  return stage_derivatives(instance, t, resource, wind, vfa, deltas,
                           nullptr)[device];
}

std::vector<double> convexity_projection(const std::vector<double>& slopes,
                                         const std::vector<double>& weights) {
  if (slopes.size() != weights.size())
    throw std::invalid_argument("convexity_projection: size mismatch");
  struct Block {
    double mean, weight;
    int count;
  };
  std::vector<Block> blocks;
  blocks.reserve(slopes.size());
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    if (!std::isfinite(slopes[i]) || weights[i] <= 0.0)
      throw std::invalid_argument("convexity_projection: bad input");
    blocks.push_back({slopes[i], weights[i], 1});
    while (blocks.size() >= 2 &&
           blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.mean = (a.mean * a.weight + b.mean * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(slopes.size());
  for (const Block& b : blocks)
    out.insert(out.end(), b.count, b.mean);
  return out;
}

void cave_update(SeparableVFA& vfa, const GridInstance& instance, int t,
                 int device, double r_observed,
                 const NumericalDerivative& derivative, double alpha) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("cave_update: stepsize out of (0, 1]");
  const auto& dev = instance.storage_devices[device];
  const double width = vfa.segment_width(instance, device);
  auto& slopes = vfa.slopes[t][device];
  auto& counts = vfa.update_counts[t][device];
  const int segments = vfa.segments;
  int s = static_cast<int>(std::floor((r_observed - dev.cap_lo) / width));
  s = std::clamp(s, 0, segments - 1);

  if (derivative.has_plus) {
    slopes[s] = (1.0 - alpha) * slopes[s] + alpha * derivative.plus;
    ++counts[s];
  }
  if (derivative.has_minus && s >= 1) {
    slopes[s - 1] = (1.0 - alpha) * slopes[s - 1] + alpha * derivative.minus;
    ++counts[s - 1];
  }
  std::vector<double> weights(segments);
  for (int i = 0; i < segments; ++i)
    weights[i] = std::max(1, counts[i]);
  slopes = convexity_projection(slopes, weights);
}

void adp_backward_pass(const GridInstance& instance, SeparableVFA& vfa,
                       const Trajectory& trajectory, int k,
                       const AdpConfig& config,
                       std::vector<BasisHint>* hints) {
  if (k < 1) throw std::invalid_argument("adp_backward_pass: k < 1");
  const double alpha = config.stepsize_a / (config.stepsize_a + k);
  const std::vector<double> deltas =
      default_deltas(instance, vfa, config.delta);
  const int devices = static_cast<int>(instance.storage_devices.size());
  for (int t = instance.horizon - 1; t >= 0; --t) {
    const ResourceState pre =
        make_resource(instance, trajectory.post_resource[t]);
    const std::vector<NumericalDerivative> ders = stage_derivatives(
        instance, t + 1, pre, trajectory.wind[t + 1], vfa, deltas,
        hints ? &(*hints)[t + 1] : nullptr);
    for (int m = 0; m < devices; ++m)
      cave_update(vfa, instance, t, m, trajectory.post_resource[t][m],
                  ders[m], alpha);
  }
}

AdpResult run_adp(const InstanceBundle& bundle, const AdpConfig& config) {
  const GridInstance& instance = bundle.grid;
  const ExogenousModel& model = bundle.wind_model;
  if (config.iterations < 0 || config.segments < 1 || config.ub_paths < 1 ||
      config.ub_every < 1 || config.stepsize_a <= 0.0)
    throw std::invalid_argument("run_adp: invalid configuration");

  AdpResult result;
  result.vfa = SeparableVFA::zero(instance, config.segments);

  nlohmann::json echo = {{"method", "adp_spwl"},
                         {"devices", instance.storage_devices.size()},
                         {"iterations", config.iterations},
                         {"segments", config.segments},
                         {"delta", config.delta},
                         {"stepsize_a", config.stepsize_a},
                         {"ub_every", config.ub_every},
                         {"ub_paths", config.ub_paths},
                         {"seed", config.seed}};
  result.log.method = "adp_spwl";
  result.log.config_echo = echo.dump();
  result.log.instance_id =
      std::to_string(std::hash<std::string>{}(to_instance_text(bundle)));

  const auto t_start = std::chrono::steady_clock::now();
  double backward_total = 0.0;
  auto record = [&](int k, bool with_ub) {
    BoundsRecord rec;
    rec.iteration = k;
    rec.has_lb = false;
    if (with_ub) {
      const PolicyStats stats = simulate_policy(
          instance, model, nullptr, PolicySpec::with_vfa(result.vfa),
          config.ub_paths, seed_mix(config.seed, 0xAB00ull + k));
      rec.has_ub = true;
      rec.ub_mean = stats.mean;
      rec.ub_stderr = stats.stderr_of_mean;
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    rec.backward_seconds = backward_total;
    result.log.records.push_back(rec);
  };

  record(0, true); // myopic baseline (all slopes zero)
  Rng rng(seed_mix(config.seed, 0xADF0ull));
  std::vector<BasisHint> forward_hints(instance.num_stages());
  std::vector<BasisHint> backward_hints(instance.num_stages());
  for (int k = 1; k <= config.iterations; ++k) {
    const Trajectory traj =
        adp_forward_pass(instance, model, result.vfa, rng, &forward_hints);
    const auto t_bwd = std::chrono::steady_clock::now();
    adp_backward_pass(instance, result.vfa, traj, k, config, &backward_hints);
    backward_total += std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_bwd)
                          .count();
    record(k, k == 1 || k == config.iterations || k % config.ub_every == 0);
  }
  return result;
}

std::string vfa_to_text(const SeparableVFA& vfa) {
  nlohmann::json doc;
  doc["segments"] = vfa.segments;
  doc["slopes"] = vfa.slopes;
  doc["update_counts"] = vfa.update_counts;
  return doc.dump(2) + "\n";
}

SeparableVFA vfa_from_text(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  SeparableVFA vfa;
  vfa.segments = doc.at("segments");
  vfa.slopes =
      doc.at("slopes").get<std::vector<std::vector<std::vector<double>>>>();
  vfa.update_counts =
      doc.at("update_counts").get<std::vector<std::vector<std::vector<int>>>>();
  return vfa;
}

} // namespace gridvfa
