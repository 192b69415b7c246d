#include "vvcm/force.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vvcm/geometry.hpp"

namespace vvcm {

double force_closure_margin(const Scene& scene, std::span<const int> taut, const Vec2& r_o) {
  std::vector<Vec2> points;
  points.reserve(taut.size());
  for (int i : taut) points.push_back(scene.robot(i));
  const auto hull = geometry::convex_hull(std::move(points));
  return geometry::interior_margin(hull, r_o);
}

bool force_closure_check(const Scene& scene, const TautSet& taut, const Vec2& r_o,
                         const Tolerances& tol) {
  return force_closure_margin(scene, taut.indices(), r_o) > tol.hull;
}

NoNonnegativeSolution::NoNonnegativeSolution(double residual)
    : std::runtime_error("no nonnegative tension balances the load (residual " +
                         std::to_string(residual) + " N)"),
      residual_(residual) {}

namespace {

Eigen::MatrixXd columns(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = a.col(idx[j]);
  return out;
}

Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return a.completeOrthogonalDecomposition().solve(b);
}

}  // namespace

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, int max_iter) {
  const Eigen::Index n = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 30);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(a.rows(), n));

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<size_t>(n), false);
  Eigen::VectorXd grad = a.transpose() * (w - a * x);

  for (int outer = 0; outer < max_iter; ++outer) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<size_t>(j)] && grad(j) > best) {
        best = grad(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<size_t>(t)] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<Eigen::Index> p;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<size_t>(j)]) p.push_back(j);
      }
      const Eigen::VectorXd s_p = min_norm_lstsq(columns(a, p), w);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
      for (size_t j = 0; j < p.size(); ++j) s(p[j]) = s_p(static_cast<Eigen::Index>(j));

      bool all_positive = true;
      double alpha = 1.0;
      for (auto j : p) {
        if (s(j) <= 0.0) {
          all_positive = false;
          alpha = std::min(alpha, x(j) / (x(j) - s(j)));
        }
      }
      if (all_positive) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      for (auto j : p) {
        if (x(j) <= tol) {
          x(j) = 0.0;
          passive[static_cast<size_t>(j)] = false;
        }
      }
    }
    grad = a.transpose() * (w - a * x);
  }
  return x;
}

namespace {

// Primal active-set iteration for min |F|^2 s.t. A F = w, F >= 0, started
// from a feasible F.
Eigen::VectorXd min_norm_refine(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, Eigen::VectorXd f) {
  const Eigen::Index n = a.cols();
  constexpr double kZero = 1e-14;
  std::vector<bool> at_bound(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) at_bound[static_cast<size_t>(j)] = f(j) <= kZero;

  for (int iter = 0; iter < 4 * n + 20; ++iter) {
    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!at_bound[static_cast<size_t>(j)]) free.push_back(j);
    }
    const Eigen::MatrixXd a_free = columns(a, free);
    // Minimum-norm F on the free set is A_free^T y with A_free A_free^T y = w.
    const Eigen::VectorXd y = min_norm_lstsq(a_free * a_free.transpose(), w);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
    for (size_t j = 0; j < free.size(); ++j) target(free[j]) = a.col(free[j]).dot(y);

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (auto j : free) {
      if (target(j) < -kZero) {
        const double step = f(j) / (f(j) - target(j));
        if (step < alpha) {
          alpha = step;
          blocking = j;
        }
      }
    }
    if (blocking >= 0) {
      f += alpha * (target - f);
      f(blocking) = 0.0;
      at_bound[static_cast<size_t>(blocking)] = true;
      continue;
    }
    f = target.cwiseMax(0.0);

    // Release the bound with the most negative multiplier, if any.
    Eigen::Index release = -1;
    double most_negative = -1e-12;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!at_bound[static_cast<size_t>(j)]) continue;
      const double mu = -a.col(j).dot(y);
      if (mu < most_negative) {
        most_negative = mu;
        release = j;
      }
    }
    if (release < 0) break;
    at_bound[static_cast<size_t>(release)] = false;
  }
  return f;
}

}  // namespace

TensionDiagnostic solve_tensions(const Scene& scene, const TautSet& taut, const Vec3& p_o,
                                 const Vec2& v_o) {
  const auto& idx = taut.indices();
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd directions(3, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const int i = idx[static_cast<size_t>(j)];
    const double length = cable_length(scene, v_o, i);
    directions.col(j) = (scene.holding_point(i) - p_o) / length;
  }
  const double weight = scene.object_mass() * scene.gravity();
  const Eigen::Vector3d load(0.0, 0.0, weight);

  Eigen::VectorXd f = nnls(directions, load);
  double residual = (directions * f - load).norm();
  if (residual > 1e-8 * weight) throw NoNonnegativeSolution(residual);

  f = min_norm_refine(directions, load, f);
  residual = (directions * f - load).norm();

  TensionDiagnostic out;
  out.tensions.assign(f.data(), f.data() + f.size());
  out.residual = residual;
  out.non_unique = k > 3;
  return out;
}

}  // namespace vvcm
