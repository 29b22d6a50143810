#pragma once

#include <string>

#include "gridvfa/grid.hpp"
#include "gridvfa/scenario.hpp"

namespace gridvfa {

/// An instance file bundles the physical grid with its wind process.
struct InstanceBundle {
  GridInstance grid;
  ExogenousModel wind_model;
  bool operator==(const InstanceBundle&) const = default;
};

/// UTF-8 structured text (JSON) with sections buses/lines/generators/
/// storage/wind/meta. Round-trips losslessly.
std::string to_instance_text(const InstanceBundle& bundle);
InstanceBundle from_instance_text(const std::string& text);

void save_instance(const InstanceBundle& bundle, const std::string& path);
InstanceBundle load_instance(const std::string& path);

/// Audit export of a sample pool: stage -> regime -> list of wind vectors.
std::string to_pool_text(const SamplePool& pool);

} // namespace gridvfa
