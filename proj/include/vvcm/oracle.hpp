#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vvcm/engine.hpp"
#include "vvcm/scene.hpp"

namespace vvcm {

/// Lowest object height allowed at (v_o, r_o):
///   z_min = max_i [z_r - sqrt(l_i^2 - |r_i - r_o|^2)],
/// and the cables attaining it.
struct EnvelopeValue {
  double z_min = 0.0;
  std::vector<int> active_set;  // 0-based, ascending
};

/// nullopt when some cable is shorter than its planar span or v_o is
/// outside the sheet. Cables within `active_tol` of the max are active.
std::optional<EnvelopeValue> envelope_at(const Scene& scene, const Vec2& v_o, const Vec2& r_o,
                                         double active_tol = 1e-9);

struct OracleOptions {
  int grid_points = 25;       // per axis of the 4-D scan
  double final_step = 1e-6;   // m
  double merge_tol = 1e-4;    // m
  std::uint64_t seed = 0x5eed;
  unsigned threads = 0;       // 0: hardware concurrency
};

struct Equilibrium {
  Vec2 v_o = Vec2::Zero();
  Vec2 r_o = Vec2::Zero();
  double z_min = 0.0;
  std::vector<int> active_set;
  bool ground_contact = false;  // z_min <= 0

  Vec4 x() const { return {r_o.x(), r_o.y(), v_o.x(), v_o.y()}; }
};

/// Grid scan over the sheet's and the formation's bounding boxes, pattern
/// search from every grid local minimum, merge of coincident results.
/// Sorted by ascending z_min.
std::vector<Equilibrium> find_equilibria(const Scene& scene, const OracleOptions& options = {});

/// Same with the grid spacing given as a length (m) instead of a point count.
std::vector<Equilibrium> find_equilibria(const Scene& scene, double coarse_resolution,
                                         OracleOptions options = {});

/// Probes the envelope on a shell of `probe_radius` around the solution.
Stability classify_solution(const Scene& scene, const Solution& solution,
                            double probe_radius = 1e-4);

}  // namespace vvcm
