#include "gridvfa/instance_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace gridvfa {

using nlohmann::json;

namespace {

json dump_wind_model(const ExogenousModel& m) {
  json w;
  w["mode"] = m.mode == WindMode::markov_lag1 ? "markov_lag1"
                                              : "stagewise_independent";
  w["mean"] = m.mean;
  w["noise_scale"] = m.noise_scale;
  w["max_output"] = m.max_output;
  w["regime_count"] = m.regime_count;
  w["regime_multiplier"] = m.regime_multiplier;
  w["regime_transition"] = m.regime_transition;
  w["initial_regime"] = m.initial_regime;
  w["seed"] = m.seed;
  return w;
}

ExogenousModel parse_wind_model(const json& w) {
  ExogenousModel m;
  const std::string mode = w.at("mode");
  if (mode == "markov_lag1") m.mode = WindMode::markov_lag1;
  else if (mode == "stagewise_independent") m.mode = WindMode::stagewise_independent;
  else throw std::runtime_error("unknown wind mode: " + mode);
  m.mean = w.at("mean").get<std::vector<std::vector<double>>>();
  m.noise_scale = w.at("noise_scale");
  m.max_output = w.at("max_output").get<std::vector<double>>();
  m.regime_count = w.at("regime_count");
  m.regime_multiplier = w.at("regime_multiplier").get<std::vector<double>>();
  m.regime_transition =
      w.at("regime_transition").get<std::vector<std::vector<double>>>();
  m.initial_regime = w.at("initial_regime");
  m.seed = w.at("seed");
  return m;
}

} // namespace

std::string to_instance_text(const InstanceBundle& bundle) {
  const GridInstance& g = bundle.grid;
  json doc;
  doc["meta"] = {{"horizon", g.horizon},
                 {"period_hours", g.period_hours},
                 {"slack_penalty", g.slack_penalty},
                 {"reference_bus", g.reference_bus}};
  doc["buses"] = json::array();
  for (const auto& b : g.buses)
    doc["buses"].push_back({{"id", b.id},
                            {"load_profile", b.load_profile},
                            {"phase_angle_bound", b.phase_angle_bound}});
  doc["lines"] = json::array();
  for (const auto& l : g.lines)
    doc["lines"].push_back({{"from_bus", l.from_bus},
                            {"to_bus", l.to_bus},
                            {"susceptance", l.susceptance},
                            {"flow_capacity", l.flow_capacity}});
  doc["generators"] = json::array();
  for (const auto& gen : g.generators)
    doc["generators"].push_back({{"bus", gen.bus},
                                 {"kappa_lo", gen.kappa_lo},
                                 {"kappa_hi", gen.kappa_hi},
                                 {"cost_profile", gen.cost_profile},
                                 {"commitment", gen.commitment}});
  doc["storage"] = json::array();
  for (const auto& s : g.storage_devices)
    doc["storage"].push_back({{"bus", s.bus},
                              {"cap_lo", s.cap_lo},
                              {"cap_hi", s.cap_hi},
                              {"eta_charge", s.eta_charge},
                              {"eta_discharge", s.eta_discharge},
                              {"cost", s.cost},
                              {"initial_energy", s.initial_energy}});
  doc["wind"] = json::array();
  for (const auto& w : g.wind_farms)
    doc["wind"].push_back({{"bus", w.bus}, {"max_output", w.max_output}});
  doc["wind_model"] = dump_wind_model(bundle.wind_model);
  return doc.dump(2) + "\n";
}

InstanceBundle from_instance_text(const std::string& text) {
  const json doc = json::parse(text);
  InstanceBundle bundle;
  GridInstance& g = bundle.grid;
  const json& meta = doc.at("meta");
  g.horizon = meta.at("horizon");
  g.period_hours = meta.at("period_hours");
  g.slack_penalty = meta.at("slack_penalty");
  g.reference_bus = meta.at("reference_bus");
  for (const auto& b : doc.at("buses")) {
    Bus bus;
    bus.id = b.at("id");
    bus.load_profile = b.at("load_profile").get<std::vector<double>>();
    bus.phase_angle_bound = b.at("phase_angle_bound");
    g.buses.push_back(std::move(bus));
  }
  for (const auto& l : doc.at("lines")) {
    TransmissionLine line;
    line.from_bus = l.at("from_bus");
    line.to_bus = l.at("to_bus");
    line.susceptance = l.at("susceptance");
    line.flow_capacity = l.at("flow_capacity");
    g.lines.push_back(line);
  }
  for (const auto& j : doc.at("generators")) {
    Generator gen;
    gen.bus = j.at("bus");
    gen.kappa_lo = j.at("kappa_lo");
    gen.kappa_hi = j.at("kappa_hi");
    gen.cost_profile = j.at("cost_profile").get<std::vector<double>>();
    gen.commitment = j.at("commitment").get<std::vector<int>>();
    g.generators.push_back(std::move(gen));
  }
  for (const auto& j : doc.at("storage")) {
    StorageDevice s;
    s.bus = j.at("bus");
    s.cap_lo = j.at("cap_lo");
    s.cap_hi = j.at("cap_hi");
    s.eta_charge = j.at("eta_charge");
    s.eta_discharge = j.at("eta_discharge");
    s.cost = j.at("cost").get<std::vector<double>>();
    s.initial_energy = j.at("initial_energy");
    g.storage_devices.push_back(std::move(s));
  }
  for (const auto& j : doc.at("wind")) {
    WindFarm w;
    w.bus = j.at("bus");
    w.max_output = j.at("max_output");
    g.wind_farms.push_back(w);
  }
  bundle.wind_model = parse_wind_model(doc.at("wind_model"));
  return bundle;
}

void save_instance(const InstanceBundle& bundle, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << to_instance_text(bundle);
}

InstanceBundle load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open instance file: " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return from_instance_text(text);
}

std::string to_pool_text(const SamplePool& pool) {
  json doc;
  doc["horizon"] = pool.horizon;
  doc["regime_count"] = pool.regime_count;
  doc["pool_size"] = pool.pool_size;
  doc["seed"] = pool.seed;
  json stages = json::array();
  for (int t = 1; t <= pool.horizon; ++t) {
    json per_regime = json::array();
    for (int r = 0; r < pool.regime_count; ++r)
      per_regime.push_back(pool.at(t, r));
    stages.push_back({{"stage", t}, {"outcomes", per_regime}});
  }
  doc["stages"] = stages;
  return doc.dump(2) + "\n";
}

} // namespace gridvfa
