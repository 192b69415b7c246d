#pragma once

#include <Eigen/Core>

#include <stdexcept>

#include "vvcm/constraints.hpp"
#include "vvcm/scene.hpp"
#include "vvcm/tolerances.hpp"

namespace vvcm {

/// f(x) = 1/2 x^T H x + c^T x + f0 = -(z_r - z_o)^2, written relative to the
/// pivot cable. H = diag(2, 2, -2, -2) is constant and indefinite.
struct Objective {
  Eigen::Matrix4d h;
  Vec4 c;
  double f0 = 0.0;

  double operator()(const Vec4& x) const { return 0.5 * x.dot(h * x) + c.dot(x) + f0; }
};

Objective build_objective(const Scene& scene, int pivot);

/// Blocks of L^{-1} = [[B, -C^T], [-C, D]] for L = [[H, -A11^T], [-A11, 0]].
struct LagrangeBlocks {
  Eigen::Matrix4d b;
  RowMatrix4 c;       // k1 x 4
  Eigen::MatrixXd d;  // k1 x k1

  Eigen::MatrixXd assemble() const;
};

/// The Lagrange matrix L itself, (4 + k1) square.
Eigen::MatrixXd lagrange_matrix(const Objective& objective, const RowMatrix4& a11);

/// A11 H^{-1} A11^T is numerically singular, so L has no inverse.
class SchurSingular : public std::runtime_error {
 public:
  SchurSingular() : std::runtime_error("A11 H^-1 A11^T is numerically singular") {}
};

/// Closed-form block inverse through the Schur complement S = A11 H^{-1} A11^T:
///   B = H^{-1} - H^{-1} A11^T S^{-1} A11 H^{-1},  C = S^{-1} A11 H^{-1},  D = -S^{-1}.
/// Throws SchurSingular when S is singular to working precision.
LagrangeBlocks lagrange_block_inverse(const Objective& objective, const RowMatrix4& a11);

struct LagrangeSolve {
  Vec4 x;
  Eigen::VectorXd lambda;
  LagrangeBlocks blocks;
};

/// Stationary point of the Lagrangian: x = -B c + C^T b11, lambda = C c - D b11.
LagrangeSolve solve_stationary(const Objective& objective, const RowMatrix4& a11,
                               const Eigen::VectorXd& b11);

enum class HeightStatus { Ok, ObjectAtHoldingHeight, ObjectOnGround };

const char* to_string(HeightStatus status);

struct HeightResult {
  HeightStatus status = HeightStatus::Ok;
  double f = 0.0;    // objective value at x
  double z_o = 0.0;  // z_r - sqrt(-f) when f < 0, otherwise z_r

  bool ok() const { return status == HeightStatus::Ok; }
};

/// z_o = z_r - sqrt(-f(x)); requires f(x) < -tol.f and z_o > tol.z.
HeightResult recover_height(const Objective& objective, const Vec4& x, double z_r,
                            const Tolerances& tol = {});

struct SlackCheck {
  bool feasible = false;
  Eigen::VectorXd margins;  // (A2 x - b2), m^2

  double min_margin() const;
};

/// Every slack cable must have margin > tol.slack and the height must be valid.
SlackCheck check_slack_and_bounds(const LinearSystem& system, const Vec4& x,
                                  const HeightResult& height, const Tolerances& tol = {});

}  // namespace vvcm
