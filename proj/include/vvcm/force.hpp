#pragma once

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <vector>

#include "vvcm/scene.hpp"
#include "vvcm/tolerances.hpp"

namespace vvcm {

/// Signed distance of r_o from the boundary of the convex hull of the taut
/// robots' planar positions (positive inside). -inf for a degenerate hull.
double force_closure_margin(const Scene& scene, std::span<const int> taut, const Vec2& r_o);

/// r_o strictly inside the hull of the taut robots, by more than tol.hull.
bool force_closure_check(const Scene& scene, const TautSet& taut, const Vec2& r_o,
                         const Tolerances& tol = {});

struct TensionDiagnostic {
  std::vector<double> tensions;  // N, one per taut cable in taut-set order
  double residual = 0.0;         // |sum F_i tau_i - m_o g e_z|, N
  bool non_unique = false;
};

class NoNonnegativeSolution : public std::runtime_error {
 public:
  explicit NoNonnegativeSolution(double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Lawson-Hanson nonnegative least squares: argmin |A F - w| subject to F >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, int max_iter = 0);

/// Minimum-norm nonnegative tensions balancing the object's weight along the
/// unit cable directions tau_i = (p_i - p_o) / l_i, l_i = |v_i - v_o|.
/// Throws NoNonnegativeSolution when no such balance exists.
TensionDiagnostic solve_tensions(const Scene& scene, const TautSet& taut, const Vec3& p_o,
                                 const Vec2& v_o);

}  // namespace vvcm
