#include <doctest.h>

#include <cstdio>
#include <string>

#include "gridvfa/instance_io.hpp"

using namespace gridvfa;

namespace {

InstanceBundle sample_bundle() {
  InstanceBundle b;
  GridInstance& g = b.grid;
  g.horizon = 2;
  g.period_hours = 0.25;
  g.slack_penalty = 5000.0;
  g.reference_bus = 0;
  g.buses = {Bus{0, {1.0, 2.0, 1.5}, 0.4}, Bus{1, {0.5, 0.5, 0.5}, 0.6}};
  g.lines = {TransmissionLine{0, 1, 12.0, 25.0}};
  g.generators = {Generator{0, 1.0, 9.0, {30.0, 31.0, 29.0}, {1, 1, 0}}};
  g.storage_devices = {
      StorageDevice{1, 0.0, 8.0, 0.92, 1.08, {0.5, 0.5, 0.5}, 3.0}};
  g.wind_farms = {WindFarm{1, 5.0}};

  ExogenousModel& m = b.wind_model;
  m.mode = WindMode::markov_lag1;
  m.mean = {{2.0}, {2.5}, {3.0}};
  m.noise_scale = 0.2;
  m.max_output = {5.0};
  m.regime_count = 2;
  m.regime_multiplier = {0.8, 1.2};
  m.regime_transition = {{0.7, 0.3}, {0.4, 0.6}};
  m.initial_regime = 1;
  m.seed = 99;
  return b;
}

} // namespace

TEST_CASE("instance text round-trips losslessly") {
  const InstanceBundle b = sample_bundle();
  const std::string text = to_instance_text(b);
  CHECK(from_instance_text(text) == b);
  // all sections present by name
  for (const char* key :
       {"meta", "buses", "lines", "generators", "storage", "wind"})
    CHECK(text.find(std::string("\"") + key + "\"") != std::string::npos);
}

TEST_CASE("file save/load round-trip") {
  const InstanceBundle b = sample_bundle();
  const std::string path = "roundtrip_instance.json";
  save_instance(b, path);
  CHECK(load_instance(path) == b);
  std::remove(path.c_str());
}

TEST_CASE("malformed text is rejected") {
  CHECK_THROWS(from_instance_text("not json at all ["));
  CHECK_THROWS(from_instance_text("{\"meta\": {}}"));
}

TEST_CASE("pool export lists every stage and regime cell") {
  const InstanceBundle b = sample_bundle();
  SamplePool pool = build_sample_pool(b.wind_model, b.grid.horizon, 3, 7);
  const std::string text = to_pool_text(pool);
  CHECK(text.find("\"stages\"") != std::string::npos);
  CHECK(text.find("\"pool_size\": 3") != std::string::npos);
}
