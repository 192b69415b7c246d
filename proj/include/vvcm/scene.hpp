#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vvcm/tolerances.hpp"

namespace vvcm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

/// Unvalidated problem input. Lengths in meters, cable indices are 0-based
/// positions in `sheet_vertices` / `robots`.
struct RawScene {
  double z_r = 0.0;
  std::vector<Vec2> sheet_vertices;
  std::vector<Vec2> robots;
  double object_mass = 1.0;
  double gravity = 9.81;
};

enum class ViolationKind {
  CountMismatch,
  TooFewRobots,
  NonPositiveHeight,
  NonFiniteValue,
  NonPositiveMassOrGravity,
  NonConvexSheet,
  InfeasiblePair,
};

std::string to_string(ViolationKind kind);

/// One violated scene invariant. `indices` are 0-based cable indices.
/// For InfeasiblePair, `robot_distance`/`vertex_distance` carry the two
/// compared lengths and `at_boundary` marks the equality case.
struct Violation {
  ViolationKind kind;
  std::vector<int> indices;
  double robot_distance = 0.0;
  double vertex_distance = 0.0;
  bool at_boundary = false;

  std::string message() const;
};

/// Validated robots-sheet-object system. Immutable; only `validate_scene`
/// creates instances.
class Scene {
 public:
  int n() const { return static_cast<int>(robots_.size()); }
  double z_r() const { return z_r_; }
  double object_mass() const { return object_mass_; }
  double gravity() const { return gravity_; }
  const std::vector<Vec2>& sheet_vertices() const { return vertices_; }
  const std::vector<Vec2>& robots() const { return robots_; }
  const Vec2& vertex(int i) const { return vertices_[static_cast<size_t>(i)]; }
  const Vec2& robot(int i) const { return robots_[static_cast<size_t>(i)]; }
  /// Holding point p_i = (r_i, z_r).
  Vec3 holding_point(int i) const { return {robot(i).x(), robot(i).y(), z_r_}; }
  /// True when the input vertex order was clockwise. Indices are never
  /// reordered; geometric predicates account for the orientation.
  bool sheet_clockwise() const { return clockwise_; }
  /// Returns true when `p` lies inside the sheet polygon (boundary counts as inside).
  bool sheet_contains(const Vec2& p, double tol = 1e-12) const;

  RawScene raw() const;

  friend bool operator==(const Scene& a, const Scene& b);

 private:
  friend struct SceneBuilder;
  Scene() = default;

  double z_r_ = 0.0;
  std::vector<Vec2> vertices_;
  std::vector<Vec2> robots_;
  double object_mass_ = 1.0;
  double gravity_ = 9.81;
  bool clockwise_ = false;
};

struct ValidationResult {
  std::optional<Scene> scene;
  std::vector<Violation> violations;

  bool ok() const { return scene.has_value(); }
};

/// Checks every scene invariant and reports all violations at once.
/// Each infeasible robot pair is reported once, as (i, j) with i < j.
ValidationResult validate_scene(const RawScene& raw, const Tolerances& tol = {});

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// validate_scene, throwing ValidationError on failure.
Scene make_scene(const RawScene& raw, const Tolerances& tol = {});

/// Virtual cable length l_i = |v_i - v_o| in the sheet frame.
double cable_length(const Scene& scene, const Vec2& v_o, int i);

/// Cable indices are 0-based internally; files and reports use 1-based labels.
std::vector<int> to_labels(std::span<const int> indices);
std::vector<int> from_labels(std::span<const int> labels);

/// Index set I_t of cables assumed taut, kept sorted (canonical form).
class TautSet {
 public:
  /// Sorts `indices`; throws std::invalid_argument on duplicates, negative
  /// indices, indices >= n or a cardinality outside [3, n].
  TautSet(std::vector<int> indices, int n);

  /// Builds from 1-based labels, e.g. TautSet::of_labels({4, 5, 8}, 8).
  static TautSet of_labels(std::vector<int> labels, int n);

  int k() const { return static_cast<int>(indices_.size()); }
  int n() const { return n_; }
  const std::vector<int>& indices() const { return indices_; }
  bool contains(int i) const;
  /// Slack set I_s = I_N \ I_t, ascending.
  std::vector<int> slack() const;
  std::vector<int> labels() const { return to_labels(indices_); }
  std::string to_string() const;

  /// Canonical order: cardinality first, then lexicographic.
  friend bool operator<(const TautSet& a, const TautSet& b);
  friend bool operator==(const TautSet& a, const TautSet& b) = default;

 private:
  std::vector<int> indices_;
  int n_ = 0;
};

}  // namespace vvcm
