// Command-line front end: instance generation, training runs, oracles,
// policy evaluation, and report assembly. Every command writes its outputs
// into --out and exits nonzero with a JSON error record on failure.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridvfa/harness.hpp"
#include "gridvfa/instance_io.hpp"
#include "gridvfa/policy.hpp"
#include "gridvfa/runlog.hpp"
#include "gridvfa/sddp.hpp"
#include "gridvfa/spwl.hpp"

namespace fs = std::filesystem;
using namespace gridvfa;

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void write_runlog(const RunLog& log, const std::string& dir) {
  write_text_file(out_path(dir, "runlog.json"), log.to_json());
  write_text_file(out_path(dir, "bounds.csv"), log.to_csv());
  write_text_file(out_path(dir, "timing.csv"), log.to_timing_csv());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid storage dispatch: SDDP and separable-PWL ADP"};
  app.require_subcommand(1);

  std::string instance_file;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int iters = 50;
  int pool_size = 20;

  auto add_common = [&](CLI::App* cmd, bool needs_instance) {
    if (needs_instance)
      cmd->add_option("--instance", instance_file, "instance file")
          ->required();
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--out", out_dir, "output directory");
  };

  // generate
  auto* generate = app.add_subcommand("generate", "write a synthetic instance");
  InstanceSpec spec;
  add_common(generate, false);
  generate->add_option("--buses", spec.bus_count, "bus count");
  generate->add_option("--devices", spec.device_count, "storage device count");
  generate->add_option("--generators", spec.generator_count, "generator count");
  generate->add_option("--wind-farms", spec.wind_farm_count, "wind farm count");
  generate->add_option("--horizon", spec.horizon, "stages after t = 0");
  generate->add_option("--regimes", spec.regime_count, "weather regime count");
  generate->add_option("--line-density", spec.line_density,
                       "lines per (buses - 1)");
  generate->add_option("--noise", spec.noise_scale,
                       "wind sigma / max output");
  generate->add_option("--period-hours", spec.period_hours, "hours per stage");

  // run-sddp
  auto* run_sddp_cmd = app.add_subcommand("run-sddp", "train SDDP cuts");
  SddpConfig sddp_cfg;
  add_common(run_sddp_cmd, true);
  run_sddp_cmd->add_option("--iters", iters, "training iterations");
  run_sddp_cmd->add_option("--pool-size", pool_size, "outcomes per stage");
  run_sddp_cmd->add_option("--rho0", sddp_cfg.rho0,
                           "proximal weight (0 disables)");
  run_sddp_cmd->add_option("--ub-every", sddp_cfg.ub_every, "UB cadence");
  run_sddp_cmd->add_option("--ub-paths", sddp_cfg.ub_paths,
                           "simulation paths per UB estimate");
  run_sddp_cmd->add_flag("--out-of-sample", sddp_cfg.ub_out_of_sample,
                         "estimate UB on the full model, not the pool");

  // run-adp
  auto* run_adp_cmd = app.add_subcommand("run-adp",
                                         "train the separable PWL function");
  AdpConfig adp_cfg;
  add_common(run_adp_cmd, true);
  run_adp_cmd->add_option("--iters", iters, "training iterations");
  run_adp_cmd->add_option("--segments", adp_cfg.segments,
                          "PWL segments per device");
  run_adp_cmd->add_option("--delta", adp_cfg.delta,
                          "derivative perturbation (<= 0: segment width)");
  run_adp_cmd->add_option("--stepsize-a", adp_cfg.stepsize_a,
                          "stepsize constant in a/(a+k)");
  run_adp_cmd->add_option("--ub-every", adp_cfg.ub_every, "UB cadence");
  run_adp_cmd->add_option("--ub-paths", adp_cfg.ub_paths,
                          "simulation paths per UB estimate");

  // run-deterministic
  auto* run_det_cmd =
      app.add_subcommand("run-deterministic",
                         "solve the full-horizon LP on the mean wind path");
  add_common(run_det_cmd, true);

  // oracle-dp
  auto* oracle_cmd = app.add_subcommand(
      "oracle-dp", "brute-force value tables on a resource grid");
  int grid_points = 50;
  add_common(oracle_cmd, true);
  oracle_cmd->add_option("--pool-size", pool_size, "outcomes per stage");
  oracle_cmd->add_option("--grid-points", grid_points, "grid points per device");

  // simulate
  auto* simulate_cmd =
      app.add_subcommand("simulate", "evaluate a policy over sampled paths");
  std::string policy_name = "myopic";
  std::string artifact_file;
  int paths = 100;
  bool in_sample = false;
  add_common(simulate_cmd, true);
  simulate_cmd
      ->add_option("--policy", policy_name, "myopic | cuts | vfa")
      ->check(CLI::IsMember({"myopic", "cuts", "vfa"}));
  simulate_cmd->add_option("--artifact", artifact_file,
                           "cuts.json or vfa.json for trained policies");
  simulate_cmd->add_option("--paths", paths, "simulation paths");
  simulate_cmd->add_option("--pool-size", pool_size, "outcomes per stage");
  simulate_cmd->add_flag("--in-sample", in_sample,
                         "draw wind from the sampled pool");

  // compare
  auto* compare_cmd =
      app.add_subcommand("compare", "assemble report files from run logs");
  std::vector<std::string> log_files;
  add_common(compare_cmd, false);
  compare_cmd->add_option("logs", log_files, "runlog.json files")
      ->required()
      ->expected(-1);

  try {
    app.parse(argc, argv);

    if (*generate) {
      spec.seed = seed;
      const InstanceBundle bundle = generate_instance(spec);
      write_text_file(out_path(out_dir, "instance.json"),
                      to_instance_text(bundle));
    } else if (*run_sddp_cmd) {
      const InstanceBundle bundle = load_instance(instance_file);
      sddp_cfg.iterations = iters;
      sddp_cfg.pool_size = pool_size;
      sddp_cfg.seed = seed;
      const SddpResult res = run_sddp(bundle, sddp_cfg);
      write_runlog(res.log, out_dir);
      write_text_file(out_path(out_dir, "cuts.json"), cuts_to_text(res.cuts));
      write_text_file(out_path(out_dir, "pool.json"), to_pool_text(res.pool));
    } else if (*run_adp_cmd) {
      const InstanceBundle bundle = load_instance(instance_file);
      adp_cfg.iterations = iters;
      adp_cfg.seed = seed;
      const AdpResult res = run_adp(bundle, adp_cfg);
      write_runlog(res.log, out_dir);
      write_text_file(out_path(out_dir, "vfa.json"), vfa_to_text(res.vfa));
    } else if (*run_det_cmd) {
      const InstanceBundle bundle = load_instance(instance_file);
      write_runlog(run_deterministic(bundle), out_dir);
    } else if (*oracle_cmd) {
      const InstanceBundle bundle = load_instance(instance_file);
      const SamplePool pool = build_sample_pool(
          bundle.wind_model, bundle.grid.horizon, pool_size, seed);
      const ValueTables tables =
          brute_force_dp(bundle.grid, bundle.wind_model, pool, grid_points);
      std::ostringstream os;
      const int devices = static_cast<int>(tables.levels.size());
      os << "stage,index";
      for (int b = 0; b < devices; ++b) os << ",level_" << b;
      os << ",value\n";
      for (std::size_t t = 0; t < tables.value.size(); ++t)
        for (std::size_t i = 0; i < tables.value[t].size(); ++i) {
          os << t << ',' << i;
          std::size_t rest = i;
          for (int b = 0; b < devices; ++b) {
            os << ',' << format_number(tables.levels[b][rest %
                                                        tables.grid_points]);
            rest /= tables.grid_points;
          }
          os << ',' << format_number(tables.value[t][i]) << '\n';
        }
      write_text_file(out_path(out_dir, "value_tables.csv"), os.str());
    } else if (*simulate_cmd) {
      const InstanceBundle bundle = load_instance(instance_file);
      CutPool cuts;
      SeparableVFA vfa;
      PolicySpec policy = PolicySpec::myopic();
      if (policy_name != "myopic" && artifact_file.empty())
        throw std::invalid_argument("simulate: --artifact required for " +
                                    policy_name);
      if (policy_name == "cuts") {
        cuts = cuts_from_text(read_text_file(artifact_file));
        policy = PolicySpec::with_cuts(cuts);
      } else if (policy_name == "vfa") {
        vfa = vfa_from_text(read_text_file(artifact_file));
        policy = PolicySpec::with_vfa(vfa);
      }
      SamplePool pool;
      if (in_sample)
        pool = build_sample_pool(bundle.wind_model, bundle.grid.horizon,
                                 pool_size, seed);
      const PolicyStats stats =
          simulate_policy(bundle.grid, bundle.wind_model,
                          in_sample ? &pool : nullptr, policy, paths, seed);
      nlohmann::json doc = {{"policy", policy_name},
                            {"paths", stats.paths},
                            {"mean", stats.mean},
                            {"stderr", stats.stderr_of_mean},
                            {"min", stats.min},
                            {"max", stats.max}};
      write_text_file(out_path(out_dir, "policy_stats.json"),
                      doc.dump(2) + "\n");
    } else if (*compare_cmd) {
      std::vector<RunLog> logs;
      logs.reserve(log_files.size());
      for (const auto& file : log_files)
        logs.push_back(RunLog::from_json(read_text_file(file)));
      const CompareReport report = compare_report(logs);
      write_text_file(out_path(out_dir, "bounds.csv"), report.bounds_csv);
      write_text_file(out_path(out_dir, "gaps.csv"), report.gap_csv);
      write_text_file(out_path(out_dir, "timing.csv"), report.timing_csv);
      write_text_file(out_path(out_dir, "sampled.csv"), report.sampled_csv);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
    nlohmann::json err = {{"error", e.what()}, {"kind", "usage"}};
    std::cerr << err.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", e.what()}, {"kind", "runtime"}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
}
