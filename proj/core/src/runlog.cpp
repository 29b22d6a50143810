#include "gridvfa/runlog.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gridvfa {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string RunLog::to_csv() const {
  std::ostringstream os;
  os << "iteration,lower_bound,ub_mean,ub_stderr,cuts_total\n";
  for (const auto& r : records) {
    os << r.iteration << ',';
    if (r.has_lb) os << format_number(r.lower_bound);
    os << ',';
    if (r.has_ub)
      os << format_number(r.ub_mean) << ',' << format_number(r.ub_stderr);
    else
      os << ',';
    os << ',' << r.cuts_total << '\n';
  }
  return os.str();
}

std::string RunLog::to_timing_csv() const {
  std::ostringstream os;
  os << "iteration,wall_seconds,backward_seconds\n";
  for (const auto& r : records)
    os << r.iteration << ',' << format_number(r.wall_seconds) << ','
       << format_number(r.backward_seconds) << '\n';
  return os.str();
}

namespace {

json stats_to_json(const PolicyStats& s) {
  return {{"paths", s.paths},
          {"mean", s.mean},
          {"stderr", s.stderr_of_mean},
          {"min", s.min},
          {"max", s.max}};
}

PolicyStats stats_from_json(const json& j) {
  PolicyStats s;
  s.paths = j.at("paths");
  s.mean = j.at("mean");
  s.stderr_of_mean = j.at("stderr");
  s.min = j.at("min");
  s.max = j.at("max");
  return s;
}

} // namespace

std::string RunLog::to_json() const {
  json doc;
  doc["method"] = method;
  doc["config"] = config_echo;
  doc["instance_id"] = instance_id;
  doc["environment"] = environment;
  json recs = json::array();
  for (const auto& r : records) {
    json jr = {{"iteration", r.iteration},
               {"wall_seconds", r.wall_seconds},
               {"backward_seconds", r.backward_seconds},
               {"cuts_total", r.cuts_total}};
    if (r.has_lb) jr["lower_bound"] = r.lower_bound;
    if (r.has_ub) {
      jr["ub_mean"] = r.ub_mean;
      jr["ub_stderr"] = r.ub_stderr;
    }
    recs.push_back(std::move(jr));
  }
  doc["records"] = std::move(recs);
  if (has_final_policy) doc["final_policy"] = stats_to_json(final_policy);
  return doc.dump(2) + "\n";
}

RunLog RunLog::from_json(const std::string& text) {
  const json doc = json::parse(text);
  RunLog log;
  log.method = doc.at("method");
  log.config_echo = doc.at("config");
  log.instance_id = doc.at("instance_id");
  log.environment = doc.value("environment", "");
  for (const auto& jr : doc.at("records")) {
    BoundsRecord r;
    r.iteration = jr.at("iteration");
    r.has_lb = jr.contains("lower_bound");
    if (r.has_lb) r.lower_bound = jr.at("lower_bound");
    r.wall_seconds = jr.at("wall_seconds");
    r.backward_seconds = jr.value("backward_seconds", 0.0);
    r.cuts_total = jr.at("cuts_total");
    if (jr.contains("ub_mean")) {
      r.has_ub = true;
      r.ub_mean = jr.at("ub_mean");
      r.ub_stderr = jr.at("ub_stderr");
    }
    log.records.push_back(r);
  }
  if (doc.contains("final_policy")) {
    log.has_final_policy = true;
    log.final_policy = stats_from_json(doc.at("final_policy"));
  }
  return log;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

} // namespace gridvfa
