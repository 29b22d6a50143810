#include <doctest.h>

#include <cmath>
#include <random>

#include "gridvfa/stage_problem.hpp"

using namespace gridvfa;

namespace {

// One bus, one generator committed from t=0 so that t=1 has the full
// dispatch range [kappa_lo, kappa_hi].
GridInstance one_bus(double load, double kappa_hi, double gen_cost,
                     double penalty) {
  GridInstance g;
  g.horizon = 1;
  g.period_hours = 1.0;
  g.slack_penalty = penalty;
  g.buses = {Bus{0, {load, load}, 0.5}};
  g.generators = {Generator{0, 0.0, kappa_hi, {gen_cost, gen_cost}, {1, 1}}};
  return g;
}

GridInstance two_bus_storage() {
  GridInstance g;
  g.horizon = 2;
  g.period_hours = 1.0;
  g.slack_penalty = 2000.0;
  g.buses = {Bus{0, {4.0, 5.0, 3.0}, 0.5}, Bus{1, {2.0, 2.0, 2.0}, 0.5}};
  g.lines = {TransmissionLine{0, 1, 20.0, 30.0}};
  g.generators = {
      Generator{0, 0.0, 20.0, {40.0, 50.0, 45.0}, {1, 1, 1}}};
  g.storage_devices = {
      StorageDevice{1, 0.0, 10.0, 1.0, 1.0, {0.0, 0.0, 0.0}, 2.0}};
  g.wind_farms = {WindFarm{1, 6.0}};
  return g;
}

ResourceState resource_of(const GridInstance& g, std::vector<double> energy) {
  ResourceState r;
  r.storage_energy = std::move(energy);
  r.generator_output.assign(g.generators.size(), 0.0);
  return r;
}

WindState wind_of(const GridInstance& g, std::vector<double> wind = {}) {
  WindState w;
  if (wind.empty()) wind.assign(g.wind_farms.size(), 0.0);
  w.current_wind = std::move(wind);
  return w;
}

double stage_optimum(const GridInstance& g, int t, const ResourceState& r,
                     const WindState& w, const VfaAttachment& vfa) {
  auto sp = build_stage(g, t, r, w, vfa);
  auto sol = solve(sp.program);
  REQUIRE(sol.status == SolveStatus::optimal);
  return sol.objective;
}

} // namespace

TEST_CASE("empty system costs nothing") {
  GridInstance g = one_bus(0.0, 10.0, 10.0, 1000.0);
  auto sp = build_stage(g, 1, resource_of(g, {}), wind_of(g),
                        VfaAttachment::none());
  auto sol = solve(sp.program);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
  const auto d = extract_decision(sol, sp.layout);
  CHECK(d.gen_output[0] == doctest::Approx(0.0));
  CHECK(d.unserved[0] == doctest::Approx(0.0));
}

TEST_CASE("single bus dispatch meets load at marginal cost") {
  GridInstance g = one_bus(5.0, 10.0, 10.0, 1000.0);
  auto sp = build_stage(g, 1, resource_of(g, {}), wind_of(g),
                        VfaAttachment::none());
  auto sol = solve(sp.program);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(50.0));
  CHECK(extract_decision(sol, sp.layout).gen_output[0] == doctest::Approx(5.0));
}

TEST_CASE("capacity shortfall is absorbed by the unserved slack") {
  GridInstance g = one_bus(5.0, 3.0, 10.0, 1000.0);
  auto sp = build_stage(g, 1, resource_of(g, {}), wind_of(g),
                        VfaAttachment::none());
  auto sol = solve(sp.program);
  REQUIRE(sol.status == SolveStatus::optimal);
  const auto d = extract_decision(sol, sp.layout);
  CHECK(d.gen_output[0] == doctest::Approx(3.0));
  CHECK(d.unserved[0] == doctest::Approx(2.0));
  CHECK(sol.objective == doctest::Approx(2030.0));
}

TEST_CASE("stage argument checking") {
  GridInstance g = two_bus_storage();
  CHECK_THROWS(build_stage(g, 3, resource_of(g, {2.0}), wind_of(g),
                           VfaAttachment::none()));
  CHECK_THROWS(build_stage(g, 1, resource_of(g, {11.0}), wind_of(g),
                           VfaAttachment::none()));
  CHECK_THROWS(build_stage(g, 1, resource_of(g, {2.0, 2.0}), wind_of(g),
                           VfaAttachment::none()));
  // terminal stage takes no value function
  CutPool pool(g.horizon, 1);
  CHECK_THROWS(build_stage(g, g.horizon, resource_of(g, {2.0}), wind_of(g),
                           VfaAttachment::with_cuts(pool, 0)));
}

TEST_CASE("cut epigraph") {
  auto value_at = [](std::vector<Cut> cuts, double rx_value) {
    ConvexProgram p;
    const int rx = p.add_variable(rx_value, rx_value, 0.0);
    epigraph_of_cuts(p, {rx}, cuts, 0.0);
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    return sol.objective;
  };

  SUBCASE("empty pool leaves only the floor") {
    CHECK(value_at({}, 2.0) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("single affine cut is evaluated") {
    Cut c{0, 0, 5.0, {-1.0}, 1};
    CHECK(value_at({c}, 2.0) == doctest::Approx(3.0));
  }
  SUBCASE("two cuts give the pointwise max, switching at their crossing") {
    Cut c1{0, 0, 5.0, {-1.0}, 1};
    Cut c2{0, 0, 1.0, {0.0}, 2};
    CHECK(value_at({c1, c2}, 2.0) == doctest::Approx(3.0)); // c1 binds
    CHECK(value_at({c1, c2}, 4.0) == doctest::Approx(1.0)); // crossing point
    CHECK(value_at({c1, c2}, 6.0) == doctest::Approx(1.0)); // c2 binds
  }
  SUBCASE("non-finite coefficients are rejected") {
    ConvexProgram p;
    const int rx = p.add_variable(0.0, 1.0, 0.0);
    Cut bad{0, 0, std::nan(""), {-1.0}, 1};
    CHECK_THROWS(epigraph_of_cuts(p, {rx}, {bad}, 0.0));
  }
}

TEST_CASE("separable piecewise-linear epigraph") {
  GridInstance g;
  g.horizon = 1;
  g.buses = {Bus{0, {0.0, 0.0}, 0.5}};
  g.storage_devices = {StorageDevice{0, 0.0, 2.0, 1.0, 1.0, {0.0, 0.0}, 0.0}};

  auto value_at = [&](std::vector<double> slopes, double rx_value) {
    SeparableVFA vfa = SeparableVFA::zero(g, static_cast<int>(slopes.size()));
    vfa.slopes[0][0] = slopes;
    ConvexProgram p;
    const int rx = p.add_variable(rx_value, rx_value, 0.0);
    epigraph_of_spwl(p, g, vfa, 0, {rx});
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    return sol.objective;
  };

  SUBCASE("zero slopes contribute nothing") {
    CHECK(value_at({0.0, 0.0}, 1.3) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("segments fill in order") {
    // widths (1,1): 1.5 units fill the -2 segment fully and half of -1
    CHECK(value_at({-2.0, -1.0}, 1.5) == doctest::Approx(-2.5));
  }
  SUBCASE("decreasing slope sequence is rejected") {
    SeparableVFA vfa = SeparableVFA::zero(g, 2);
    vfa.slopes[0][0] = {-1.0, -2.0};
    ConvexProgram p;
    const int rx = p.add_variable(0.0, 2.0, 0.0);
    CHECK_THROWS(epigraph_of_spwl(p, g, vfa, 0, {rx}));
  }
  SUBCASE("evaluate matches the optimized contribution") {
    SeparableVFA vfa = SeparableVFA::zero(g, 2);
    vfa.slopes[0][0] = {-2.0, -1.0};
    CHECK(vfa.evaluate(g, 0, 0, 1.5) == doctest::Approx(-2.5));
    CHECK(vfa.evaluate(g, 0, 0, 0.0) == doctest::Approx(0.0));
    CHECK(vfa.evaluate(g, 0, 0, 2.0) == doctest::Approx(-3.0));
  }
}

TEST_CASE("resource duals") {
  SUBCASE("stored energy without future use is worthless") {
    GridInstance g = two_bus_storage();
    for (auto& b : g.buses) b.load_profile = {0.0, 0.0, 0.0};
    auto sp = build_stage(g, 1, resource_of(g, {5.0}), wind_of(g),
                          VfaAttachment::none());
    auto sol = solve(sp.program);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(resource_duals(sol, sp.layout)[0] == doctest::Approx(0.0));
  }
  SUBCASE("one more stored MWh displaces the marginal generator") {
    GridInstance g = two_bus_storage();
    g.generators[0].cost_profile = {50.0, 50.0, 50.0};
    auto sp = build_stage(g, 1, resource_of(g, {2.0}), wind_of(g),
                          VfaAttachment::none());
    auto sol = solve(sp.program);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(resource_duals(sol, sp.layout)[0] == doctest::Approx(-50.0));
  }
  SUBCASE("duals match a finite-difference re-solve off degeneracy") {
    GridInstance g = two_bus_storage();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> energy(0.5, 9.5);
    std::uniform_real_distribution<double> wind_mw(0.0, 6.0);
    const double h = 1e-4;
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 10; ++trial) {
      const double r0 = energy(rng);
      const WindState w = wind_of(g, {wind_mw(rng)});
      auto sp = build_stage(g, 1, resource_of(g, {r0}), w,
                            VfaAttachment::none());
      auto sol = solve(sp.program);
      REQUIRE(sol.status == SolveStatus::optimal);
      if (sol.degenerate) continue;
      auto sp_h = build_stage(g, 1, resource_of(g, {r0 + h}), w,
                              VfaAttachment::none());
      auto sol_h = solve(sp_h.program);
      REQUIRE(sol_h.status == SolveStatus::optimal);
      const double beta = resource_duals(sol, sp.layout)[0];
      const double fd = (sol_h.objective - sol.objective) / h;
      CHECK(std::abs(fd - beta) <= 1e-6 * (1.0 + std::abs(beta)));
      ++checked;
    }
    CHECK(checked >= 5);
  }
  SUBCASE("non-optimal solution is rejected") {
    Solution sol;
    sol.status = SolveStatus::iteration_limit;
    StageTemplate layout;
    CHECK_THROWS(resource_duals(sol, layout));
  }
}

TEST_CASE("complete recourse: every in-bounds state solves") {
  GridInstance g = two_bus_storage();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> energy(0.0, 10.0);
  std::uniform_real_distribution<double> wind_mw(0.0, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int t = static_cast<int>(rng() % 3);
    auto sp = build_stage(g, t, resource_of(g, {energy(rng)}),
                          wind_of(g, {wind_mw(rng)}), VfaAttachment::none());
    auto sol = solve(sp.program);
    CHECK(sol.status == SolveStatus::optimal);
  }
}

TEST_CASE("stage optimum is convex in the incoming resource") {
  GridInstance g = two_bus_storage();
  const WindState w = wind_of(g, {1.5});
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> energy(0.0, 10.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double r1 = energy(rng), r2 = energy(rng);
    const double f1 =
        stage_optimum(g, 1, resource_of(g, {r1}), w, VfaAttachment::none());
    const double f2 =
        stage_optimum(g, 1, resource_of(g, {r2}), w, VfaAttachment::none());
    const double fm = stage_optimum(g, 1, resource_of(g, {0.5 * (r1 + r2)}), w,
                                    VfaAttachment::none());
    CHECK(fm <= 0.5 * (f1 + f2) + 1e-6);
  }
}

TEST_CASE("myopic, empty cut pool, and zero-slope spwl optima coincide") {
  GridInstance g = two_bus_storage();
  CutPool pool(g.horizon, 1);
  SeparableVFA vfa = SeparableVFA::zero(g);
  const ResourceState r = resource_of(g, {4.0});
  const WindState w = wind_of(g, {2.0});
  const double f_none = stage_optimum(g, 1, r, w, VfaAttachment::none());
  const double f_cuts =
      stage_optimum(g, 1, r, w, VfaAttachment::with_cuts(pool, 0));
  const double f_spwl =
      stage_optimum(g, 1, r, w, VfaAttachment::with_spwl(vfa));
  CHECK(f_cuts == doctest::Approx(f_none).epsilon(1e-12));
  CHECK(f_spwl == doctest::Approx(f_none).epsilon(1e-12));
}

TEST_CASE("proximal term pulls the post-decision state toward its center") {
  // Unregularized, the device empties itself against 50 $/MWh generation;
  // a heavy proximal weight should hold it near the center instead.
  GridInstance g = two_bus_storage();
  g.generators[0].cost_profile = {50.0, 50.0, 50.0};
  auto sp0 = build_stage(g, 1, resource_of(g, {5.0}), wind_of(g),
                         VfaAttachment::none());
  auto sol0 = solve(sp0.program);
  REQUIRE(sol0.status == SolveStatus::optimal);
  CHECK(extract_post_resource(sol0, sp0.layout)[0] ==
        doctest::Approx(0.0).epsilon(1e-9));

  ProxTerm prox;
  prox.center = {3.0};
  prox.rho = 1e5;
  auto sp = build_stage(g, 1, resource_of(g, {5.0}), wind_of(g),
                        VfaAttachment::none(), prox);
  auto sol = solve(sp.program);
  REQUIRE(sol.status == SolveStatus::optimal);
  // optimum of the regularized stage: center shifted by marginal value / rho
  CHECK(extract_post_resource(sol, sp.layout)[0] ==
        doctest::Approx(3.0 - 50.0 / prox.rho).epsilon(1e-3));
}

TEST_CASE("immediate cost matches the objective when no value term is attached") {
  GridInstance g = two_bus_storage();
  auto sp = build_stage(g, 1, resource_of(g, {2.0}), wind_of(g, {1.0}),
                        VfaAttachment::none());
  auto sol = solve(sp.program);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(immediate_cost(g, sp.layout, sol, 1) ==
        doctest::Approx(sol.objective).epsilon(1e-9));
}
