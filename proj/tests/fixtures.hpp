#pragma once

#include "gridvfa/instance_io.hpp"

namespace gridvfa::fixtures {

/// Two buses, one line, one generator, one storage device, one wind farm,
/// horizon 3, two-outcome pools. Loads at t = 0 are zero because a freshly
/// committed generator is pinned to its minimum there.
inline InstanceBundle tiny3(double noise = 0.25) {
  InstanceBundle bundle;
  GridInstance& g = bundle.grid;
  g.horizon = 3;
  g.period_hours = 1.0;
  g.slack_penalty = 500.0;
  g.reference_bus = 0;
  g.buses = {Bus{0, {0.0, 4.0, 6.0, 5.0}, 0.6},
             Bus{1, {0.0, 2.0, 3.0, 2.0}, 0.6}};
  g.lines = {TransmissionLine{0, 1, 10.0, 30.0}};
  g.generators = {
      Generator{0, 0.0, 30.0, {10.0, 30.0, 60.0, 40.0}, {1, 1, 1, 1}}};
  g.storage_devices = {StorageDevice{
      1, 0.0, 8.0, 0.9, 1.1, {0.1, 0.1, 0.1, 0.1}, 2.0}};
  g.wind_farms = {WindFarm{1, 6.0}};

  ExogenousModel& m = bundle.wind_model;
  m.mode = WindMode::stagewise_independent;
  m.mean = {{3.0}, {2.5}, {2.0}, {1.5}};
  m.noise_scale = noise;
  m.max_output = {6.0};
  m.regime_count = 1;
  m.regime_multiplier = {1.0};
  m.regime_transition = {{1.0}};
  m.initial_regime = 0;
  m.seed = 4242;
  return bundle;
}

/// Single bus, horizon 1: stored energy displaces a 50 $/MWh generator at
/// stage 1, so the converged stage-0 value slope is -50 on [0, 5].
inline InstanceBundle two_stage() {
  InstanceBundle bundle;
  GridInstance& g = bundle.grid;
  g.horizon = 1;
  g.period_hours = 1.0;
  g.slack_penalty = 500.0;
  g.buses = {Bus{0, {0.0, 5.0}, 0.5}};
  g.generators = {Generator{0, 0.0, 20.0, {1.0, 50.0}, {1, 1}}};
  g.storage_devices = {StorageDevice{0, 0.0, 10.0, 1.0, 1.0, {0.0, 0.0}, 4.0}};
  g.wind_farms = {WindFarm{0, 1.0}};

  ExogenousModel& m = bundle.wind_model;
  m.mean = {{0.0}, {0.0}};
  m.noise_scale = 0.0;
  m.max_output = {1.0};
  m.regime_multiplier = {1.0};
  m.regime_transition = {{1.0}};
  m.seed = 7;
  return bundle;
}

/// Single bus, horizon 2: cheap generation at stage 1, expensive load at
/// stage 2 — charging is optimal iff the stage-1 value function knows it.
inline InstanceBundle charge_incentive() {
  InstanceBundle bundle = two_stage();
  GridInstance& g = bundle.grid;
  g.horizon = 2;
  g.buses[0].load_profile = {0.0, 0.0, 5.0};
  g.generators[0].cost_profile = {1.0, 1.0, 50.0};
  g.generators[0].commitment = {1, 1, 1};
  g.storage_devices[0].cost = {0.0, 0.0, 0.0};
  g.storage_devices[0].initial_energy = 0.0;
  bundle.wind_model.mean = {{0.0}, {0.0}, {0.0}};
  return bundle;
}

} // namespace gridvfa::fixtures
