#pragma once

#include <string>
#include <string_view>

namespace vvcm {

/// Numerical thresholds used to decide the strict inequalities of the model.
/// Squared-length quantities (f, slack margins) are in m^2, the rest in m.
struct Tolerances {
  double rank = 1e-9;    // zero-pivot threshold, relative to max(1, row norm)
  double f = 1e-12;      // f(x) < -f  (object strictly below the holding height)
  double z = 1e-9;       // z_o > z   (object strictly above the ground)
  double slack = 1e-9;   // slack margin (A2 x - b2)_l > slack
  double hull = 1e-9;    // r_o at least this far inside every hull edge
  double pair = 1e-9;    // formation pairs within this of equality are flagged as boundary

  /// Applies "key=value,key=value" overrides. Keys: rank, f, z, slack, hull, pair.
  /// Throws std::invalid_argument on unknown keys or malformed values.
  void apply_overrides(std::string_view overrides);
};

}  // namespace vvcm
