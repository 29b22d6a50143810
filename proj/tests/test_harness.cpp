#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gridvfa/harness.hpp"
#include "gridvfa/sddp.hpp"

using namespace gridvfa;

namespace {

std::vector<std::string> split_csv_line(const std::string& csv, int line) {
  std::istringstream is(csv);
  std::string row;
  for (int i = 0; i <= line; ++i) std::getline(is, row);
  std::vector<std::string> fields;
  std::string field;
  std::istringstream rs(row);
  while (std::getline(rs, field, ',')) fields.push_back(field);
  if (!row.empty() && row.back() == ',') fields.push_back("");
  return fields;
}

} // namespace

TEST_CASE("instance generation") {
  SUBCASE("deterministic given the spec") {
    InstanceSpec spec;
    spec.bus_count = 8;
    spec.horizon = 12;
    spec.device_count = 3;
    spec.seed = 99;
    const std::string a = to_instance_text(generate_instance(spec));
    const std::string b = to_instance_text(generate_instance(spec));
    CHECK(a == b);
    spec.seed = 100;
    CHECK(to_instance_text(generate_instance(spec)) != a);
  }
  SUBCASE("network is connected with the requested extra lines") {
    InstanceSpec spec;
    spec.bus_count = 12;
    spec.line_density = 1.5;
    spec.horizon = 6;
    spec.seed = 3;
    const InstanceBundle bundle = generate_instance(spec);
    CHECK(static_cast<int>(bundle.grid.lines.size()) ==
          static_cast<int>(std::lround(1.5 * 11)));
    // union-find over the lines reaches every bus
    std::vector<int> parent(12);
    for (int i = 0; i < 12; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& line : bundle.grid.lines)
      parent[find(line.from_bus)] = find(line.to_bus);
    for (int i = 1; i < 12; ++i) CHECK(find(i) == find(0));
  }
  SUBCASE("storage lands on wind buses first") {
    InstanceSpec spec;
    spec.bus_count = 10;
    spec.wind_farm_count = 4;
    spec.device_count = 3; // fewer devices than wind farms
    spec.horizon = 6;
    spec.seed = 7;
    const InstanceBundle bundle = generate_instance(spec);
    std::set<int> wind_buses;
    for (const auto& farm : bundle.grid.wind_farms)
      wind_buses.insert(farm.bus);
    for (const auto& dev : bundle.grid.storage_devices)
      CHECK(wind_buses.count(dev.bus) == 1);
  }
  SUBCASE("many devices per the paper's largest study still validate") {
    InstanceSpec spec;
    spec.bus_count = 20;
    spec.device_count = 100;
    spec.wind_farm_count = 5;
    spec.horizon = 12;
    spec.seed = 1;
    const InstanceBundle bundle = generate_instance(spec);
    CHECK(bundle.grid.storage_devices.size() == 100);
    CHECK(validate_instance(bundle.grid).ok());
    CHECK(validate_model(bundle.wind_model).empty());
  }
  SUBCASE("nonsense specs are rejected") {
    InstanceSpec spec;
    spec.bus_count = 0;
    CHECK_THROWS_AS(generate_instance(spec), std::invalid_argument);
    spec = InstanceSpec{};
    spec.wind_farm_count = spec.bus_count + 1;
    CHECK_THROWS_AS(generate_instance(spec), std::invalid_argument);
  }
}

TEST_CASE("mean wind path") {
  const InstanceBundle bundle = fixtures::tiny3();
  const auto path = mean_wind_path(bundle.wind_model, bundle.grid.horizon);
  REQUIRE(path.size() == 4);
  for (int t = 0; t <= 3; ++t)
    CHECK(path[t] == bundle.wind_model.mean[t]);
}

TEST_CASE("deterministic full-horizon optimum") {
  SUBCASE("flat prices and no free energy leave the storage untouched") {
    InstanceBundle bundle = fixtures::tiny3(0.0);
    bundle.grid.generators[0].cost_profile = {30.0, 30.0, 30.0, 30.0};
    bundle.grid.storage_devices[0].initial_energy = 0.0;
    for (auto& m : bundle.wind_model.mean) m = {0.0};
    const auto path = mean_wind_path(bundle.wind_model, bundle.grid.horizon);
    const DeterministicSolution det =
        deterministic_optimum(bundle.grid, path);
    // round-trip losses make arbitrage at one price a strict loss:
    // pay the full load 0 + 6 + 9 + 7 = 22 MWh at 30 $/MWh
    CHECK(det.objective == doctest::Approx(660.0).epsilon(1e-9));
    for (const auto& rx : det.post_resource)
      CHECK(rx[0] == doctest::Approx(0.0));
  }
  SUBCASE("price spread makes it charge ahead") {
    const InstanceBundle bundle = fixtures::charge_incentive();
    const auto path = mean_wind_path(bundle.wind_model, bundle.grid.horizon);
    const DeterministicSolution det =
        deterministic_optimum(bundle.grid, path);
    // charge 5 MWh at 1 $/MWh in stage 1, discharge into the stage-2 load
    CHECK(det.objective == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(det.post_resource[1][0] == doctest::Approx(5.0));
  }
  SUBCASE("zero loads cost nothing") {
    InstanceBundle bundle = fixtures::tiny3(0.0);
    for (auto& b : bundle.grid.buses) b.load_profile.assign(4, 0.0);
    bundle.grid.storage_devices[0].cost.assign(4, 0.0);
    const auto path = mean_wind_path(bundle.wind_model, bundle.grid.horizon);
    CHECK(deterministic_optimum(bundle.grid, path).objective ==
          doctest::Approx(0.0));
  }
  SUBCASE("wrong path length is rejected") {
    const InstanceBundle bundle = fixtures::tiny3(0.0);
    CHECK_THROWS_AS(deterministic_optimum(bundle.grid, {{3.0}, {2.0}}),
                    std::invalid_argument);
  }
}

TEST_CASE("brute-force value tables") {
  SUBCASE("costless system has all-zero values") {
    InstanceBundle bundle = fixtures::tiny3(0.0);
    for (auto& b : bundle.grid.buses) b.load_profile.assign(4, 0.0);
    bundle.grid.generators[0].cost_profile.assign(4, 0.0);
    bundle.grid.storage_devices[0].cost.assign(4, 0.0);
    const SamplePool pool =
        build_sample_pool(bundle.wind_model, bundle.grid.horizon, 2, 1);
    const ValueTables tables =
        brute_force_dp(bundle.grid, bundle.wind_model, pool, 17);
    for (const auto& stage : tables.value)
      for (double v : stage) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("degenerate pool matches the deterministic optimum") {
    const InstanceBundle bundle = fixtures::tiny3(0.0);
    const SamplePool pool =
        build_sample_pool(bundle.wind_model, bundle.grid.horizon, 1, 5);
    const ValueTables tables =
        brute_force_dp(bundle.grid, bundle.wind_model, pool, 33);
    const double det =
        deterministic_optimum(bundle.grid,
                              mean_wind_path(bundle.wind_model, 3))
            .objective;
    const double v0 = tables.interpolate(0, {2.0});
    CHECK(v0 == doctest::Approx(det).epsilon(1e-3));
  }
  SUBCASE("oracle triangle: dp, extensive form, and sddp agree") {
    const InstanceBundle bundle = fixtures::tiny3();
    SddpConfig cfg;
    cfg.pool_size = 2;
    cfg.iterations = 30;
    cfg.ub_every = 30;
    cfg.ub_paths = 10;
    cfg.seed = 41;
    const SddpResult res = run_sddp(bundle, cfg);
    const double lb = res.log.records.back().lower_bound;
    const double ext =
        extensive_form_optimum(bundle.grid, bundle.wind_model, res.pool);
    const ValueTables tables =
        brute_force_dp(bundle.grid, bundle.wind_model, res.pool, 129);
    const double v0 = tables.interpolate(0, {2.0});
    CHECK(v0 == doctest::Approx(ext).epsilon(1e-3));
    CHECK(lb <= v0 + 1e-3 * (1.0 + std::abs(v0)));
  }
  SUBCASE("size guards reject what the enumeration cannot afford") {
    InstanceSpec spec;
    spec.bus_count = 4;
    spec.device_count = 3;
    spec.wind_farm_count = 1;
    spec.generator_count = 1;
    spec.horizon = 2;
    const InstanceBundle big = generate_instance(spec);
    const SamplePool pool = build_sample_pool(big.wind_model, 2, 2, 1);
    CHECK_THROWS_AS(brute_force_dp(big.grid, big.wind_model, pool, 9),
                    std::invalid_argument);
  }
}

TEST_CASE("policy simulation statistics") {
  const InstanceBundle bundle = fixtures::tiny3(0.0);
  const PolicyStats stats = simulate_policy(
      bundle.grid, bundle.wind_model, nullptr, PolicySpec::myopic(), 4, 17);
  CHECK(stats.paths == 4);
  CHECK(stats.stderr_of_mean == doctest::Approx(0.0));
  CHECK(stats.min == doctest::Approx(stats.mean));
  CHECK(stats.max == doctest::Approx(stats.mean));
}

TEST_CASE("packaged myopic and deterministic runs") {
  const InstanceBundle bundle = fixtures::tiny3();
  const RunLog myo = run_myopic(bundle, 8, 2);
  CHECK(myo.method == "myopic");
  CHECK(myo.has_final_policy);
  REQUIRE(myo.records.size() == 1);
  CHECK_FALSE(myo.records[0].has_lb);
  const RunLog det = run_deterministic(bundle);
  CHECK(det.method == "deterministic");
  REQUIRE(det.records.size() == 1);
  CHECK(det.records[0].lower_bound == doctest::Approx(det.records[0].ub_mean));
  CHECK(det.instance_id == myo.instance_id);
}

TEST_CASE("comparison report") {
  SUBCASE("gap arithmetic") {
    RunLog sddp;
    sddp.method = "sddp";
    sddp.instance_id = "x";
    sddp.config_echo = R"({"devices":1,"pool_size":2})";
    BoundsRecord rec;
    rec.iteration = 1;
    rec.lower_bound = 90.0;
    rec.has_ub = true;
    rec.ub_mean = 100.0;
    sddp.records.push_back(rec);

    RunLog myo;
    myo.method = "myopic";
    myo.instance_id = "x";
    myo.config_echo = R"({"devices":1})";
    BoundsRecord mrec;
    mrec.iteration = 0;
    mrec.has_lb = false;
    mrec.has_ub = true;
    mrec.ub_mean = 190.0;
    myo.records.push_back(mrec);

    const CompareReport rep = compare_report({sddp, myo});
    const auto row = split_csv_line(rep.gap_csv, 1);
    REQUIRE(row.size() == 5);
    CHECK(row[0] == "sddp");
    CHECK(std::stod(row[1]) == doctest::Approx(90.0));
    CHECK(std::stod(row[2]) == doctest::Approx(100.0));
    CHECK(std::stod(row[3]) == doctest::Approx(10.0 / 90.0));
    CHECK(std::stod(row[4]) == doctest::Approx(0.1));
    const auto myo_row = split_csv_line(rep.gap_csv, 2);
    CHECK(myo_row[1] == "n/a"); // no lower bound, no gaps
    CHECK(myo_row[3] == "n/a");

    const auto sampled = split_csv_line(rep.sampled_csv, 1);
    REQUIRE(sampled.size() == 4);
    CHECK(sampled[0] == "2");
    CHECK(std::stod(sampled[1]) == doctest::Approx(90.0));
  }
  SUBCASE("lone myopic log yields only n/a gaps") {
    const RunLog myo = run_myopic(fixtures::tiny3(), 4, 5);
    const CompareReport rep = compare_report({myo});
    const auto row = split_csv_line(rep.gap_csv, 1);
    CHECK(row[1] == "n/a");
    CHECK(row[3] == "n/a");
    CHECK(row[4] == "n/a");
  }
  SUBCASE("mixed-instance logs are rejected") {
    RunLog a, b;
    a.instance_id = "1";
    b.instance_id = "2";
    CHECK_THROWS_AS(compare_report({a, b}), std::invalid_argument);
  }
  SUBCASE("deterministic inputs give identical reports") {
    const InstanceBundle bundle = fixtures::tiny3();
    SddpConfig cfg;
    cfg.pool_size = 2;
    cfg.iterations = 4;
    cfg.ub_every = 2;
    cfg.ub_paths = 5;
    cfg.seed = 19;
    const SddpResult res = run_sddp(bundle, cfg);
    const RunLog myo = run_myopic(bundle, 5, 19);
    const CompareReport r1 = compare_report({res.log, myo});
    const CompareReport r2 = compare_report({res.log, myo});
    CHECK(r1.bounds_csv == r2.bounds_csv);
    CHECK(r1.gap_csv == r2.gap_csv);
    CHECK(r1.sampled_csv == r2.sampled_csv);
    // bounds rows: one per record per log, plus the header
    std::size_t rows = 0;
    for (char c : r1.bounds_csv) rows += (c == '\n');
    CHECK(rows == res.log.records.size() + myo.records.size() + 1);
  }
}
