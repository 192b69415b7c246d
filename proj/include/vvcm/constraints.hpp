#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vvcm/scene.hpp"
#include "vvcm/tolerances.hpp"

namespace vvcm {

using RowMatrix4 = Eigen::Matrix<double, Eigen::Dynamic, 4>;

/// One linearized cable equation a^T x = b, x = (x_o, y_o, x_vo, y_vo),
/// obtained by subtracting the pivot cable's length equation from cable j's.
struct ConstraintRow {
  Vec4 a;
  double b = 0.0;
};

ConstraintRow constraint_row(const Scene& scene, int pivot, int j);

/// Taut equalities A1 x = b1, slack inequalities A2 x > b2 and, once reduced,
/// the row-independent subset A11 x = b11.
struct LinearSystem {
  int pivot = -1;
  std::vector<int> taut_rows;   // cable index of each a1 row
  std::vector<int> slack_rows;  // cable index of each a2 row
  RowMatrix4 a1;
  Eigen::VectorXd b1;
  RowMatrix4 a2;
  Eigen::VectorXd b2;

  bool reduced = false;
  bool consistent = false;  // rank(A1) == rank([A1 b1])
  int k1 = 0;
  RowMatrix4 a11;
  Eigen::VectorXd b11;
  std::vector<int> row_map;  // rows of a1 kept in a11, ascending

  /// Cables whose equations were linearly redundant.
  std::vector<int> redundant_cables() const;
};

class PivotNotTaut : public std::invalid_argument {
 public:
  explicit PivotNotTaut(int pivot);
};

/// Builds A1/b1 and A2/b2 for `taut`. The pivot defaults to the smallest
/// taut index.
LinearSystem build_linear_system(const Scene& scene, const TautSet& taut,
                                 std::optional<int> pivot = std::nullopt);

/// Result of reducing [A | b] by Gaussian elimination with partial pivoting.
struct RowReduction {
  int rank = 0;
  bool consistent = true;
  std::vector<int> independent_rows;  // original row ids of the pivot rows, ascending
};

/// A pivot counts as zero when |pivot| <= eps * max(1, |original row|).
/// A leftover row with zero coefficients is inconsistent when its reduced
/// right-hand side exceeds the same threshold.
RowReduction reduce_augmented(const RowMatrix4& a, const Eigen::VectorXd& b, double eps);

/// Form closure: rank(A1) == rank([A1 b1]).
bool form_closure_check(const LinearSystem& system, const Tolerances& tol = {});

/// Fills a11/b11/k1/row_map (and `consistent`) from one reduction of [A1 b1].
LinearSystem extract_independent_rows(LinearSystem system, const Tolerances& tol = {});

}  // namespace vvcm
