#include <benchmark/benchmark.h>

#include "gridvfa/harness.hpp"
#include "gridvfa/sddp.hpp"
#include "gridvfa/spwl.hpp"
#include "gridvfa/stage_problem.hpp"

using namespace gridvfa;

namespace {

InstanceBundle bench_instance(int devices) {
  InstanceSpec spec;
  spec.bus_count = 20;
  spec.device_count = devices;
  spec.generator_count = 5;
  spec.wind_farm_count = 4;
  spec.horizon = 24;
  spec.seed = 1234;
  return generate_instance(spec);
}

ResourceState mid_resource(const GridInstance& g) {
  ResourceState r;
  for (const auto& dev : g.storage_devices)
    r.storage_energy.push_back(0.5 * (dev.cap_lo + dev.cap_hi));
  r.generator_output.assign(g.generators.size(), 0.0);
  return r;
}

void bm_stage_solve(benchmark::State& state) {
  const InstanceBundle bundle = bench_instance(static_cast<int>(state.range(0)));
  const GridInstance& g = bundle.grid;
  const ResourceState r = mid_resource(g);
  WindState w = bundle.wind_model.initial_state();
  for (auto _ : state) {
    auto sp = build_stage(g, 1, r, w, VfaAttachment::none());
    const Solution sol = solve(sp.program);
    benchmark::DoNotOptimize(sol.objective);
  }
}

void bm_stage_solve_warm(benchmark::State& state) {
  const InstanceBundle bundle = bench_instance(static_cast<int>(state.range(0)));
  const GridInstance& g = bundle.grid;
  const ResourceState r = mid_resource(g);
  WindState w = bundle.wind_model.initial_state();
  auto sp = build_stage(g, 1, r, w, VfaAttachment::none());
  BasisHint hint;
  hint.store(solve(sp.program), sp.program);
  for (auto _ : state) {
    const Solution sol = warm_solve(sp.program, hint.adapt(sp.program));
    benchmark::DoNotOptimize(sol.objective);
  }
}

void bm_forward_pass(benchmark::State& state) {
  const InstanceBundle bundle = bench_instance(static_cast<int>(state.range(0)));
  const SamplePool pool =
      build_sample_pool(bundle.wind_model, bundle.grid.horizon, 10, 7);
  CutPool cuts(bundle.grid.horizon, 1);
  Rng rng(1);
  std::vector<BasisHint> hints(bundle.grid.num_stages());
  for (auto _ : state) {
    const Trajectory traj = forward_pass(bundle.grid, bundle.wind_model, pool,
                                         cuts, 1, nullptr, 0.0, rng, &hints);
    benchmark::DoNotOptimize(traj.stage_costs.data());
  }
}

void bm_backward_pass(benchmark::State& state) {
  const InstanceBundle bundle = bench_instance(5);
  const int pool_size = static_cast<int>(state.range(0));
  const SamplePool pool =
      build_sample_pool(bundle.wind_model, bundle.grid.horizon, pool_size, 7);
  Rng rng(1);
  std::vector<BasisHint> fwd(bundle.grid.num_stages());
  std::vector<BasisHint> bwd(bundle.grid.num_stages());
  int k = 0;
  for (auto _ : state) {
    // cuts accumulate across iterations, as they do in a real run
    state.PauseTiming();
    static thread_local CutPool cuts;
    if (k == 0) cuts = CutPool(bundle.grid.horizon, 1);
    const Trajectory traj = forward_pass(bundle.grid, bundle.wind_model, pool,
                                         cuts, ++k, nullptr, 0.0, rng, &fwd);
    state.ResumeTiming();
    backward_pass(bundle.grid, bundle.wind_model, pool, cuts, traj, k, &bwd);
  }
}

void bm_adp_backward_pass(benchmark::State& state) {
  const InstanceBundle bundle = bench_instance(static_cast<int>(state.range(0)));
  AdpConfig cfg;
  SeparableVFA vfa = SeparableVFA::zero(bundle.grid, cfg.segments);
  Rng rng(1);
  int k = 0;
  for (auto _ : state) {
    state.PauseTiming();
    const Trajectory traj =
        adp_forward_pass(bundle.grid, bundle.wind_model, vfa, rng);
    state.ResumeTiming();
    adp_backward_pass(bundle.grid, vfa, traj, ++k, cfg);
  }
}

BENCHMARK(bm_stage_solve)->Arg(5)->Arg(25)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_stage_solve_warm)->Arg(5)->Arg(25)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_forward_pass)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_backward_pass)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_adp_backward_pass)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
