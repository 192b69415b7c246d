#pragma once

#include <span>
#include <vector>

#include "vvcm/scene.hpp"

namespace vvcm::geometry {

/// z-component of (b - a) x (c - a).
inline double cross(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

/// Shoelace area, positive for counterclockwise order.
double signed_area(std::span<const Vec2> polygon);

/// Convex hull in counterclockwise order without collinear points
/// (Andrew's monotone chain). Fewer than 3 points means a degenerate hull.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

/// Smallest signed distance from `p` to the edges of a counterclockwise
/// convex polygon; positive inside, negative outside. Returns -inf for a
/// degenerate polygon.
double interior_margin(std::span<const Vec2> ccw_convex, const Vec2& p);

}  // namespace vvcm::geometry
