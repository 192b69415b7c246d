#include "vvcm/cqp.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace vvcm {

namespace {

// Relative singular-value floor for the Schur complement.
constexpr double kSchurRcond = 1e-12;

}  // namespace

Objective build_objective(const Scene& scene, int pivot) {
  const Vec2& r = scene.robot(pivot);
  const Vec2& v = scene.vertex(pivot);
  Objective obj;
  obj.h = Vec4(2.0, 2.0, -2.0, -2.0).asDiagonal();
  obj.c << -2.0 * r.x(), -2.0 * r.y(), 2.0 * v.x(), 2.0 * v.y();
  obj.f0 = r.squaredNorm() - v.squaredNorm();
  return obj;
}

Eigen::MatrixXd LagrangeBlocks::assemble() const {
  const Eigen::Index k1 = c.rows();
  Eigen::MatrixXd inv(4 + k1, 4 + k1);
  inv.topLeftCorner(4, 4) = b;
  inv.topRightCorner(4, k1) = -c.transpose();
  inv.bottomLeftCorner(k1, 4) = -c;
  inv.bottomRightCorner(k1, k1) = d;
  return inv;
}

Eigen::MatrixXd lagrange_matrix(const Objective& objective, const RowMatrix4& a11) {
  const Eigen::Index k1 = a11.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4 + k1, 4 + k1);
  l.topLeftCorner(4, 4) = objective.h;
  l.topRightCorner(4, k1) = -a11.transpose();
  l.bottomLeftCorner(k1, 4) = -a11;
  return l;
}

LagrangeBlocks lagrange_block_inverse(const Objective& objective, const RowMatrix4& a11) {
  // H is diagonal and nonsingular.
  const Eigen::Matrix4d h_inv = objective.h.diagonal().cwiseInverse().asDiagonal();
  const RowMatrix4 a_hinv = a11 * h_inv;
  const Eigen::MatrixXd schur = a_hinv * a11.transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(schur);
  const auto& sv = svd.singularValues();
  if (sv.size() > 0) {
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smin > kSchurRcond * std::max(1.0, smax))) throw SchurSingular();
  }
  const Eigen::MatrixXd schur_inv = schur.fullPivLu().inverse();

  LagrangeBlocks blocks;
  blocks.c = schur_inv * a_hinv;
  blocks.b = h_inv - a_hinv.transpose() * blocks.c;
  blocks.d = -schur_inv;

  // One Newton-Schulz step X <- X + X (I - L X) recovers the accuracy the
  // explicit Schur inverse loses when S is poorly conditioned.
  const Eigen::MatrixXd l = lagrange_matrix(objective, a11);
  Eigen::MatrixXd x = blocks.assemble();
  x += x * (Eigen::MatrixXd::Identity(l.rows(), l.cols()) - l * x);
  const Eigen::Index k1 = a11.rows();
  blocks.b = 0.5 * (x.topLeftCorner(4, 4) + x.topLeftCorner(4, 4).transpose());
  blocks.c = -0.5 * (x.bottomLeftCorner(k1, 4) + x.topRightCorner(4, k1).transpose());
  blocks.d = 0.5 * (x.bottomRightCorner(k1, k1) + x.bottomRightCorner(k1, k1).transpose());
  return blocks;
}

LagrangeSolve solve_stationary(const Objective& objective, const RowMatrix4& a11,
                               const Eigen::VectorXd& b11) {
  LagrangeSolve out;
  out.blocks = lagrange_block_inverse(objective, a11);
  out.x = -out.blocks.b * objective.c + out.blocks.c.transpose() * b11;
  out.lambda = out.blocks.c * objective.c - out.blocks.d * b11;

  // One refinement step on L (x, lambda) = (-c, -b11).
  const Eigen::Index k1 = a11.rows();
  Eigen::VectorXd rhs(4 + k1), sol(4 + k1);
  rhs << -objective.c, -b11;
  sol << out.x, out.lambda;
  sol += out.blocks.assemble() * (rhs - lagrange_matrix(objective, a11) * sol);
  out.x = sol.head<4>();
  out.lambda = sol.tail(k1);
  return out;
}

const char* to_string(HeightStatus status) {
  switch (status) {
    case HeightStatus::Ok: return "Ok";
    case HeightStatus::ObjectAtHoldingHeight: return "ObjectAtHoldingHeight";
    case HeightStatus::ObjectOnGround: return "ObjectOnGround";
  }
  return "Unknown";
}

HeightResult recover_height(const Objective& objective, const Vec4& x, double z_r,
                            const Tolerances& tol) {
  HeightResult out;
  out.f = objective(x);
  if (!(out.f < -tol.f)) {
    out.status = HeightStatus::ObjectAtHoldingHeight;
    out.z_o = z_r;
    return out;
  }
  out.z_o = z_r - std::sqrt(-out.f);
  if (!(out.z_o > tol.z)) out.status = HeightStatus::ObjectOnGround;
  return out;
}

double SlackCheck::min_margin() const {
  return margins.size() ? margins.minCoeff() : std::numeric_limits<double>::infinity();
}

SlackCheck check_slack_and_bounds(const LinearSystem& system, const Vec4& x,
                                  const HeightResult& height, const Tolerances& tol) {
  SlackCheck out;
  out.margins = system.a2 * x - system.b2;
  out.feasible = height.ok() && (out.margins.size() == 0 || out.margins.minCoeff() > tol.slack);
  return out;
}

}  // namespace vvcm
