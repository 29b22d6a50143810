#pragma once

#include <string>
#include <vector>

namespace gridvfa {

/// One training iteration's bookkeeping. UB fields are only meaningful when
/// has_ub is set (bounds are estimated at a sparse cadence).
struct BoundsRecord {
  int iteration = 0;
  bool has_lb = true; // false for methods without a deterministic bound
  double lower_bound = 0.0;
  bool has_ub = false;
  double ub_mean = 0.0;
  double ub_stderr = 0.0;
  double wall_seconds = 0.0;
  double backward_seconds = 0.0; // cumulative time in backward passes
  int cuts_total = 0;
};

struct PolicyStats {
  int paths = 0;
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Full record of one training or evaluation run.
struct RunLog {
  std::string method;      // sddp | adp_spwl | myopic | deterministic
  std::string config_echo; // JSON string reproducing the run configuration
  std::string instance_id; // used by compare to reject mismatched logs
  std::vector<BoundsRecord> records;
  bool has_final_policy = false;
  PolicyStats final_policy;
  std::string environment; // free-form metadata, excluded from the CSV

  /// Deterministic per-iteration CSV (iteration, lower_bound, ub_mean,
  /// ub_stderr, cuts_total). Wall-clock times live in timing_csv so that
  /// equal-seed runs produce byte-identical files.
  std::string to_csv() const;
  std::string to_timing_csv() const;

  std::string to_json() const;
  static RunLog from_json(const std::string& text);
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Fixed-format float used by every report writer (shortest round-trip
/// representation, locale-independent).
std::string format_number(double x);

} // namespace gridvfa
