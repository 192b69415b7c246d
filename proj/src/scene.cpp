#include "vvcm/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vvcm/geometry.hpp"

namespace vvcm {

namespace {

constexpr double kConvexityEps = 1e-12;  // m^2

bool finite(const Vec2& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); }

std::string join_labels(const std::vector<int>& indices) {
  std::ostringstream out;
  for (size_t i = 0; i < indices.size(); ++i) out << (i ? ", " : "") << indices[i] + 1;
  return out.str();
}

}  // namespace

struct SceneBuilder {
  static Scene build(const RawScene& raw, bool clockwise) {
    Scene s;
    s.z_r_ = raw.z_r;
    s.vertices_ = raw.sheet_vertices;
    s.robots_ = raw.robots;
    s.object_mass_ = raw.object_mass;
    s.gravity_ = raw.gravity;
    s.clockwise_ = clockwise;
    return s;
  }
};

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::CountMismatch: return "CountMismatch";
    case ViolationKind::TooFewRobots: return "TooFewRobots";
    case ViolationKind::NonPositiveHeight: return "NonPositiveHeight";
    case ViolationKind::NonFiniteValue: return "NonFiniteValue";
    case ViolationKind::NonPositiveMassOrGravity: return "NonPositiveMassOrGravity";
    case ViolationKind::NonConvexSheet: return "NonConvexSheet";
    case ViolationKind::InfeasiblePair: return "InfeasiblePair";
  }
  return "Unknown";
}

std::string Violation::message() const {
  std::ostringstream out;
  out << to_string(kind);
  switch (kind) {
    case ViolationKind::CountMismatch:
      out << ": sheet vertex and robot counts differ";
      break;
    case ViolationKind::TooFewRobots:
      out << ": at least three robots are required";
      break;
    case ViolationKind::NonPositiveHeight:
      out << ": holding height z_r must be positive";
      break;
    case ViolationKind::NonFiniteValue:
      out << ": non-finite coordinate at cable " << join_labels(indices);
      break;
    case ViolationKind::NonPositiveMassOrGravity:
      out << ": object mass and gravity must be positive";
      break;
    case ViolationKind::NonConvexSheet:
      if (indices.empty()) {
        out << ": sheet polygon winds more than once";
      } else {
        out << ": sheet polygon is not strictly convex at vertex " << join_labels(indices);
      }
      break;
    case ViolationKind::InfeasiblePair:
      out << ": robots " << join_labels(indices) << " are " << robot_distance
          << " m apart but their sheet vertices only " << vertex_distance << " m";
      if (at_boundary) out << " (equal lengths, boundary of feasibility)";
      break;
  }
  return out.str();
}

bool Scene::sheet_contains(const Vec2& p, double tol) const {
  const double orient = clockwise_ ? -1.0 : 1.0;
  const size_t n = vertices_.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const double len = (b - a).norm();
    if (orient * geometry::cross(a, b, p) / len < -tol) return false;
  }
  return true;
}

RawScene Scene::raw() const {
  return RawScene{z_r_, vertices_, robots_, object_mass_, gravity_};
}

bool operator==(const Scene& a, const Scene& b) {
  return a.z_r_ == b.z_r_ && a.vertices_ == b.vertices_ && a.robots_ == b.robots_ &&
         a.object_mass_ == b.object_mass_ && a.gravity_ == b.gravity_ &&
         a.clockwise_ == b.clockwise_;
}

ValidationResult validate_scene(const RawScene& raw, const Tolerances& tol) {
  ValidationResult result;
  auto& out = result.violations;

  const size_t n = raw.robots.size();
  if (!(raw.z_r > 0.0) || !std::isfinite(raw.z_r)) {
    out.push_back({ViolationKind::NonPositiveHeight, {}});
  }
  if (!(raw.object_mass > 0.0) || !(raw.gravity > 0.0) || !std::isfinite(raw.object_mass) ||
      !std::isfinite(raw.gravity)) {
    out.push_back({ViolationKind::NonPositiveMassOrGravity, {}});
  }
  if (raw.sheet_vertices.size() != n) {
    out.push_back({ViolationKind::CountMismatch, {}});
    return result;
  }
  if (n < 3) out.push_back({ViolationKind::TooFewRobots, {}});

  std::vector<int> non_finite;
  for (size_t i = 0; i < n; ++i) {
    if (!finite(raw.sheet_vertices[i]) || !finite(raw.robots[i])) {
      non_finite.push_back(static_cast<int>(i));
    }
  }
  if (!non_finite.empty()) {
    out.push_back({ViolationKind::NonFiniteValue, non_finite});
    return result;
  }
  if (n < 3) return result;

  // Strict convexity: every corner turns the same way by more than the
  // tolerance, and the boundary winds exactly once.
  const auto& v = raw.sheet_vertices;
  const double orient = geometry::signed_area(v) < 0.0 ? -1.0 : 1.0;
  bool corners_ok = true;
  double turning = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& prev = v[(i + n - 1) % n];
    const Vec2& next = v[(i + 1) % n];
    const double c = orient * geometry::cross(prev, v[i], next);
    if (!(c > kConvexityEps)) {
      out.push_back({ViolationKind::NonConvexSheet, {static_cast<int>(i)}});
      corners_ok = false;
    }
    const Vec2 e1 = v[i] - prev;
    const Vec2 e2 = next - v[i];
    turning += std::atan2(e1.x() * e2.y() - e1.y() * e2.x(), e1.dot(e2));
  }
  if (corners_ok && std::abs(std::abs(turning) - 2.0 * std::numbers::pi) > 1e-6) {
    out.push_back({ViolationKind::NonConvexSheet, {}});
  }

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double dr = (raw.robots[i] - raw.robots[j]).norm();
      const double dv = (v[i] - v[j]).norm();
      if (dr < dv - tol.pair) continue;
      Violation bad{ViolationKind::InfeasiblePair, {static_cast<int>(i), static_cast<int>(j)}};
      bad.robot_distance = dr;
      bad.vertex_distance = dv;
      bad.at_boundary = std::abs(dr - dv) <= tol.pair;
      out.push_back(std::move(bad));
    }
  }

  if (out.empty()) result.scene = SceneBuilder::build(raw, orient < 0.0);
  return result;
}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << "invalid scene (" << violations.size() << " violation"
      << (violations.size() == 1 ? "" : "s") << ")";
  for (const auto& v : violations) out << "\n  " << v.message();
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

Scene make_scene(const RawScene& raw, const Tolerances& tol) {
  auto result = validate_scene(raw, tol);
  if (!result.ok()) throw ValidationError(std::move(result.violations));
  return std::move(*result.scene);
}

double cable_length(const Scene& scene, const Vec2& v_o, int i) {
  return (scene.vertex(i) - v_o).norm();
}

std::vector<int> to_labels(std::span<const int> indices) {
  std::vector<int> labels(indices.begin(), indices.end());
  for (auto& l : labels) ++l;
  return labels;
}

std::vector<int> from_labels(std::span<const int> labels) {
  std::vector<int> indices(labels.begin(), labels.end());
  for (auto& i : indices) --i;
  return indices;
}

TautSet::TautSet(std::vector<int> indices, int n) : indices_(std::move(indices)), n_(n) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("taut set has duplicate cable indices");
  }
  if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= n)) {
    throw std::invalid_argument("taut set index out of range");
  }
  if (k() < 3 || k() > n) {
    throw std::invalid_argument("taut set cardinality must be within [3, n]");
  }
}

TautSet TautSet::of_labels(std::vector<int> labels, int n) {
  return TautSet(from_labels(labels), n);
}

bool TautSet::contains(int i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::vector<int> TautSet::slack() const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n_ - k()));
  for (int i = 0; i < n_; ++i) {
    if (!contains(i)) out.push_back(i);
  }
  return out;
}

std::string TautSet::to_string() const {
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < indices_.size(); ++i) out << (i ? "," : "") << indices_[i] + 1;
  out << '}';
  return out.str();
}

bool operator<(const TautSet& a, const TautSet& b) {
  if (a.k() != b.k()) return a.k() < b.k();
  return a.indices_ < b.indices_;
}

}  // namespace vvcm
