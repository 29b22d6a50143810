#pragma once

#include <stdexcept>
#include <vector>

#include "gridvfa/grid.hpp"

namespace gridvfa {

/// Affine minorant of a post-decision value function:
/// value >= intercept + <slope, R^x>.
struct Cut {
  int stage = 0;
  int regime = 0;
  double intercept = 0.0;
  std::vector<double> slope; // $/MWh per storage device
  int iteration = 0;
};

/// Per (stage, regime) append-only cut collections. Cuts are never deleted
/// or modified; the lower bound's validity depends on that.
class CutPool {
public:
  CutPool() = default;
  CutPool(int horizon, int regime_count)
      : horizon_(horizon), regime_count_(regime_count),
        cells_(static_cast<std::size_t>(horizon + 1) * regime_count) {}

  const std::vector<Cut>& at(int t, int regime) const {
    return cells_[index(t, regime)];
  }
  void append(Cut cut) {
    auto& cell = cells_[index(cut.stage, cut.regime)];
    cell.push_back(std::move(cut));
  }
  int horizon() const { return horizon_; }
  int regime_count() const { return regime_count_; }
  int total() const {
    int n = 0;
    for (const auto& c : cells_) n += static_cast<int>(c.size());
    return n;
  }

private:
  std::size_t index(int t, int regime) const {
    if (t < 0 || t > horizon_ || regime < 0 || regime >= regime_count_)
      throw std::out_of_range("CutPool: (stage, regime) out of range");
    return static_cast<std::size_t>(t) * regime_count_ + regime;
  }
  int horizon_ = 0;
  int regime_count_ = 1;
  std::vector<std::vector<Cut>> cells_;
};

/// Convex piecewise-linear value function per (stage, device) on a uniform
/// breakpoint grid over [cap_lo, cap_hi]. Slopes must be nondecreasing
/// within each (t, b).
struct SeparableVFA {
  int segments = 20;
  // [stage][device][segment]
  std::vector<std::vector<std::vector<double>>> slopes;
  std::vector<std::vector<std::vector<int>>> update_counts;

  static SeparableVFA zero(const GridInstance& instance, int segments = 20);

  double segment_width(const GridInstance& instance, int device) const {
    const auto& dev = instance.storage_devices[device];
    return (dev.cap_hi - dev.cap_lo) / segments;
  }

  /// Value of the (t, device) component at energy level r.
  double evaluate(const GridInstance& instance, int t, int device,
                  double r) const;
};

} // namespace gridvfa
