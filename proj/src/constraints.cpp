#include "vvcm/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vvcm {

ConstraintRow constraint_row(const Scene& scene, int pivot, int j) {
  const Vec2& r1 = scene.robot(pivot);
  const Vec2& v1 = scene.vertex(pivot);
  const Vec2& rj = scene.robot(j);
  const Vec2& vj = scene.vertex(j);
  ConstraintRow row;
  row.a << rj.x() - r1.x(), rj.y() - r1.y(), v1.x() - vj.x(), v1.y() - vj.y();
  row.b = 0.5 * (v1.squaredNorm() - vj.squaredNorm() - r1.squaredNorm() + rj.squaredNorm());
  return row;
}

std::vector<int> LinearSystem::redundant_cables() const {
  std::vector<int> out;
  for (size_t r = 0; r < taut_rows.size(); ++r) {
    if (!std::binary_search(row_map.begin(), row_map.end(), static_cast<int>(r))) {
      out.push_back(taut_rows[r]);
    }
  }
  return out;
}

PivotNotTaut::PivotNotTaut(int pivot)
    : std::invalid_argument("pivot cable " + std::to_string(pivot + 1) + " is not in the taut set") {}

LinearSystem build_linear_system(const Scene& scene, const TautSet& taut, std::optional<int> pivot) {
  LinearSystem sys;
  sys.pivot = pivot.value_or(taut.indices().front());
  if (!taut.contains(sys.pivot)) throw PivotNotTaut(sys.pivot);

  for (int i : taut.indices()) {
    if (i != sys.pivot) sys.taut_rows.push_back(i);
  }
  sys.slack_rows = taut.slack();

  auto fill = [&](const std::vector<int>& cables, RowMatrix4& a, Eigen::VectorXd& b) {
    a.resize(static_cast<Eigen::Index>(cables.size()), 4);
    b.resize(static_cast<Eigen::Index>(cables.size()));
    for (size_t r = 0; r < cables.size(); ++r) {
      const auto row = constraint_row(scene, sys.pivot, cables[r]);
      a.row(static_cast<Eigen::Index>(r)) = row.a.transpose();
      b(static_cast<Eigen::Index>(r)) = row.b;
    }
  };
  fill(sys.taut_rows, sys.a1, sys.b1);
  fill(sys.slack_rows, sys.a2, sys.b2);
  return sys;
}

RowReduction reduce_augmented(const RowMatrix4& a, const Eigen::VectorXd& b, double eps) {
  const Eigen::Index m = a.rows();
  Eigen::Matrix<double, Eigen::Dynamic, 5> work(m, 5);
  work.leftCols<4>() = a;
  work.col(4) = b;

  std::vector<int> ids(static_cast<size_t>(m));
  std::vector<double> thresholds(static_cast<size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) {
    ids[static_cast<size_t>(r)] = static_cast<int>(r);
    thresholds[static_cast<size_t>(r)] = eps * std::max(1.0, a.row(r).norm());
  }

  RowReduction out;
  Eigen::Index top = 0;
  for (int col = 0; col < 4 && top < m; ++col) {
    Eigen::Index best = top;
    for (Eigen::Index r = top + 1; r < m; ++r) {
      if (std::abs(work(r, col)) > std::abs(work(best, col))) best = r;
    }
    if (std::abs(work(best, col)) <= thresholds[static_cast<size_t>(ids[static_cast<size_t>(best)])]) {
      continue;
    }
    if (best != top) {
      work.row(best).swap(work.row(top));
      std::swap(ids[static_cast<size_t>(best)], ids[static_cast<size_t>(top)]);
    }
    for (Eigen::Index r = top + 1; r < m; ++r) {
      const double factor = work(r, col) / work(top, col);
      if (factor != 0.0) work.row(r) -= factor * work.row(top);
    }
    out.independent_rows.push_back(ids[static_cast<size_t>(top)]);
    ++top;
  }
  out.rank = static_cast<int>(top);

  // Rows below `top` have (numerically) zero coefficients.
  for (Eigen::Index r = top; r < m; ++r) {
    if (std::abs(work(r, 4)) > thresholds[static_cast<size_t>(ids[static_cast<size_t>(r)])]) {
      out.consistent = false;
      break;
    }
  }
  std::sort(out.independent_rows.begin(), out.independent_rows.end());
  return out;
}

bool form_closure_check(const LinearSystem& system, const Tolerances& tol) {
  if (system.reduced) return system.consistent;
  return reduce_augmented(system.a1, system.b1, tol.rank).consistent;
}

LinearSystem extract_independent_rows(LinearSystem system, const Tolerances& tol) {
  const auto red = reduce_augmented(system.a1, system.b1, tol.rank);
  system.reduced = true;
  system.consistent = red.consistent;
  system.k1 = red.rank;
  system.row_map = red.independent_rows;
  system.a11.resize(system.k1, 4);
  system.b11.resize(system.k1);
  for (int r = 0; r < system.k1; ++r) {
    system.a11.row(r) = system.a1.row(system.row_map[static_cast<size_t>(r)]);
    system.b11(r) = system.b1(system.row_map[static_cast<size_t>(r)]);
  }
  return system;
}

}  // namespace vvcm
