#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vvcm/constraints.hpp"
#include "vvcm/cqp.hpp"
#include "vvcm/scene.hpp"
#include "vvcm/tolerances.hpp"

namespace vvcm {

/// Second-order verdict on an equilibrium, from probing the height envelope.
enum class Stability { StrictLocalMin, Saddle, Degenerate };

const char* to_string(Stability stability);

/// One static equilibrium of the object.
struct Solution {
  explicit Solution(TautSet taut) : taut_set(std::move(taut)) {}

  TautSet taut_set;
  Vec3 p_o = Vec3::Zero();  // world position (x_o, y_o, z_o), m
  Vec2 v_o = Vec2::Zero();  // contact point in the sheet frame, m
  double energy = 0.0;      // m_o g z_o, J
  std::vector<double> slack_margins;  // (A2 x - b2) per slack cable, m^2
  std::vector<double> tensions;       // N, taut-set order
  double tension_residual = 0.0;
  bool tensions_unique = true;
  double hull_margin = 0.0;  // distance of r_o inside the taut robots' hull, m
  int k1 = 0;
  int pivot = 0;  // 0-based cable index
  std::optional<Stability> stability;

  Vec4 x() const { return {p_o.x(), p_o.y(), v_o.x(), v_o.y()}; }
};

/// Survivors after each filtering step: all sets, form closure, CQP
/// feasibility, force closure.
struct StepStats {
  std::array<std::uint64_t, 4> counts{};
  std::map<int, std::uint64_t> by_k;  // accepted solutions per taut count
  std::uint64_t schur_singular = 0;
  double wall_time = 0.0;  // s

  void merge(const StepStats& other);
};

enum class Stage {
  FormClosureFailed,
  SchurSingular,
  HeightInfeasible,
  SlackViolated,
  ForceClosureFailed,
  Accepted,
};

const char* to_string(Stage stage);

/// Everything learned about one taut set on its way through the filters.
struct TautSetOutcome {
  Stage stage = Stage::FormClosureFailed;
  int pivot = 0;
  int k1 = 0;
  std::optional<Vec4> x;          // stationary point, when one was computed
  std::optional<double> z_o;      // height, when f(x) < 0
  double min_slack_margin = 0.0;  // +inf when every cable is taut
  double hull_margin = 0.0;
  std::optional<Solution> solution;
};

/// Runs the four filters on one taut set. `pivot` is a 0-based cable index
/// that must belong to the set; the smallest index is used when omitted.
TautSetOutcome evaluate_taut_set(const Scene& scene, const TautSet& taut,
                                 std::optional<int> pivot = std::nullopt,
                                 const Tolerances& tol = {});

/// Number of subsets of {1..n} with 3 to n elements.
std::uint64_t count_taut_sets(int n);

/// Subsets of size 3..n in canonical order, (k ascending, lexicographic),
/// optionally restricted to a rank range [begin, end).
class TautSetStream {
 public:
  explicit TautSetStream(int n);
  TautSetStream(int n, std::uint64_t begin, std::uint64_t end);

  /// Writes the next subset (0-based, ascending) and returns true, or
  /// returns false once the range is exhausted.
  bool next(std::vector<int>& out);

 private:
  int n_;
  std::uint64_t remaining_;
  std::vector<int> current_;
  bool started_ = false;
};

/// The `rank`-th subset in canonical order, 0-based indices.
std::vector<int> unrank_taut_set(int n, std::uint64_t rank);

std::vector<TautSet> enumerate_taut_sets(int n);

struct FkOptions {
  Tolerances tol;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Uses the j-th member (0-based, modulo k) of each taut set as pivot.
  std::optional<int> pivot_position;
  bool classify_stability = true;
  double probe_radius = 1e-4;  // m
};

struct FkResult {
  std::vector<Solution> solutions;  // canonical taut-set order
  StepStats stats;
  std::vector<TautSet> schur_singular;  // sets skipped as degenerate
};

class InfeasibleFormation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

FkResult solve_fk(const Scene& scene, const FkOptions& options = {});

/// Validates first; throws InfeasibleFormation on any violated invariant.
FkResult solve_fk(const RawScene& raw, const FkOptions& options = {});

class EmptySolutionSet : public std::invalid_argument {
 public:
  EmptySolutionSet() : std::invalid_argument("no solutions to choose from") {}
};

/// The solution with the lowest object height. Heights within 1e-9 m tie;
/// ties go to the smaller taut set, then the lexicographically smaller one.
const Solution& lowest_energy(const std::vector<Solution>& solutions);

/// Groups solutions whose p_o and v_o agree within `tol` (max norm, m),
/// transitively. Groups and members keep canonical order.
std::vector<std::vector<std::size_t>> cluster_solutions(const std::vector<Solution>& solutions,
                                                        double tol);

class InvalidRadii : public std::invalid_argument {
 public:
  InvalidRadii(double r_s, double r_f);
};

/// Concentric regular polygons: v_i = r_s (cos t_i, sin t_i), r_i = r_f (cos t_i, sin t_i),
/// t_i = 2 pi i / n for 0-based i. Requires 0 < r_f < r_s.
Scene regular_polygon_scene(int n, double r_s, double r_f, double z_r);

}  // namespace vvcm
