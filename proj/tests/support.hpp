#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "vvcm/scene.hpp"

namespace vvcm::test {

inline std::string data_path(const std::string& name) { return std::string(VVCM_DATA_DIR) + "/" + name; }

/// A strictly convex sheet with a shrunken, jittered, rigidly moved copy as
/// the formation. Retries until the scene validates.
inline Scene random_scene(std::mt19937_64& rng, int n, double z_r = 1.5) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    RawScene raw;
    raw.z_r = z_r;
    const double spacing = 2.0 * std::numbers::pi / n;
    const double phase = spacing * unit(rng);
    const double shrink = 0.45 + 0.3 * unit(rng);
    const double turn = 0.6 * (unit(rng) - 0.5);
    const Vec2 shift(unit(rng) - 0.5, unit(rng) - 0.5);
    const Eigen::Rotation2Dd rot(turn);
    for (int i = 0; i < n; ++i) {
      const double t = phase + spacing * (i + 0.35 * (unit(rng) - 0.5));
      const double radius = 0.7 + 0.3 * unit(rng);
      const Vec2 v = radius * Vec2(std::cos(t), std::sin(t));
      const Vec2 jitter = 0.06 * Vec2(unit(rng) - 0.5, unit(rng) - 0.5);
      raw.sheet_vertices.push_back(v);
      raw.robots.push_back(rot * (shrink * v + jitter) + shift);
    }
    auto result = validate_scene(raw);
    if (result.ok()) return std::move(*result.scene);
  }
}

}  // namespace vvcm::test
