#include "vvcm/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "vvcm/force.hpp"
#include "vvcm/oracle.hpp"

namespace vvcm {

const char* to_string(Stability stability) {
  switch (stability) {
    case Stability::StrictLocalMin: return "StrictLocalMin";
    case Stability::Saddle: return "Saddle";
    case Stability::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::FormClosureFailed: return "FormClosureFailed";
    case Stage::SchurSingular: return "SchurSingular";
    case Stage::HeightInfeasible: return "HeightInfeasible";
    case Stage::SlackViolated: return "SlackViolated";
    case Stage::ForceClosureFailed: return "ForceClosureFailed";
    case Stage::Accepted: return "Accepted";
  }
  return "Unknown";
}

void StepStats::merge(const StepStats& other) {
  for (size_t s = 0; s < counts.size(); ++s) counts[s] += other.counts[s];
  for (const auto& [k, c] : other.by_k) by_k[k] += c;
  schur_singular += other.schur_singular;
  wall_time = std::max(wall_time, other.wall_time);
}

TautSetOutcome evaluate_taut_set(const Scene& scene, const TautSet& taut, std::optional<int> pivot,
                                 const Tolerances& tol) {
  TautSetOutcome out;
  const LinearSystem sys = extract_independent_rows(build_linear_system(scene, taut, pivot), tol);
  out.pivot = sys.pivot;
  out.k1 = sys.k1;
  if (!sys.consistent) return out;

  const Objective objective = build_objective(scene, sys.pivot);
  LagrangeSolve solve;
  try {
    solve = solve_stationary(objective, sys.a11, sys.b11);
  } catch (const SchurSingular&) {
    out.stage = Stage::SchurSingular;
    return out;
  }
  const Vec4& x = solve.x;
  out.x = x;

  const HeightResult height = recover_height(objective, x, scene.z_r(), tol);
  if (height.status != HeightStatus::ObjectAtHoldingHeight) out.z_o = height.z_o;
  const SlackCheck slack = check_slack_and_bounds(sys, x, height, tol);
  out.min_slack_margin = slack.min_margin();
  if (!height.ok()) {
    out.stage = Stage::HeightInfeasible;
    return out;
  }
  if (!slack.feasible) {
    out.stage = Stage::SlackViolated;
    return out;
  }

  const Vec2 r_o = x.head<2>();
  out.hull_margin = force_closure_margin(scene, taut.indices(), r_o);
  if (!(out.hull_margin > tol.hull)) {
    out.stage = Stage::ForceClosureFailed;
    return out;
  }
  out.stage = Stage::Accepted;

  Solution s(taut);
  s.p_o = Vec3(x(0), x(1), height.z_o);
  s.v_o = x.tail<2>();
  s.energy = scene.object_mass() * scene.gravity() * height.z_o;
  s.slack_margins.assign(slack.margins.data(), slack.margins.data() + slack.margins.size());
  const TensionDiagnostic tensions = solve_tensions(scene, taut, s.p_o, s.v_o);
  s.tensions = tensions.tensions;
  s.tension_residual = tensions.residual;
  s.tensions_unique = !tensions.non_unique;
  s.hull_margin = out.hull_margin;
  s.k1 = sys.k1;
  s.pivot = sys.pivot;
  out.solution = std::move(s);
  return out;
}

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return c;
}

// Advances to the next k-subset in lexicographic order; false after the last.
bool next_same_size(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[static_cast<size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++c[static_cast<size_t>(i)];
  for (int j = i + 1; j < k; ++j) c[static_cast<size_t>(j)] = c[static_cast<size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

std::uint64_t count_taut_sets(int n) {
  std::uint64_t total = 0;
  for (int k = 3; k <= n; ++k) total += binomial(n, k);
  return total;
}

std::vector<int> unrank_taut_set(int n, std::uint64_t rank) {
  if (rank >= count_taut_sets(n)) throw std::out_of_range("taut-set rank out of range");
  int k = 3;
  while (rank >= binomial(n, k)) rank -= binomial(n, k++);
  std::vector<int> out;
  out.reserve(static_cast<size_t>(k));
  int next = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (;; ++next) {
      const std::uint64_t with_next = binomial(n - next - 1, k - slot - 1);
      if (rank < with_next) break;
      rank -= with_next;
    }
    out.push_back(next++);
  }
  return out;
}

TautSetStream::TautSetStream(int n) : TautSetStream(n, 0, count_taut_sets(n)) {}

TautSetStream::TautSetStream(int n, std::uint64_t begin, std::uint64_t end)
    : n_(n), remaining_(end > begin ? end - begin : 0) {
  if (remaining_ > 0) current_ = unrank_taut_set(n, begin);
}

bool TautSetStream::next(std::vector<int>& out) {
  if (remaining_ == 0) return false;
  if (started_ && !next_same_size(current_, n_)) {
    const size_t k = current_.size() + 1;
    current_.resize(k);
    for (size_t j = 0; j < k; ++j) current_[j] = static_cast<int>(j);
  }
  started_ = true;
  --remaining_;
  out = current_;
  return true;
}

std::vector<TautSet> enumerate_taut_sets(int n) {
  std::vector<TautSet> out;
  out.reserve(static_cast<size_t>(count_taut_sets(n)));
  TautSetStream stream(n);
  std::vector<int> c;
  while (stream.next(c)) out.emplace_back(c, n);
  return out;
}

FkResult solve_fk(const Scene& scene, const FkOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = scene.n();
  const std::uint64_t total = count_taut_sets(n);
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;

  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));

  FkResult result;
  std::mutex merge_mutex;
  std::atomic<std::uint64_t> next_chunk{0};

  auto work = [&] {
    FkResult local;
    std::vector<int> indices;
    for (std::uint64_t chunk; (chunk = next_chunk.fetch_add(1)) < chunks;) {
      TautSetStream stream(n, chunk * kChunk, std::min(total, (chunk + 1) * kChunk));
      while (stream.next(indices)) {
        const TautSet taut(indices, n);
        std::optional<int> pivot;
        if (options.pivot_position) {
          const int k = taut.k();
          pivot = taut.indices()[static_cast<size_t>(((*options.pivot_position % k) + k) % k)];
        }
        TautSetOutcome outcome = evaluate_taut_set(scene, taut, pivot, options.tol);
        auto& counts = local.stats.counts;
        ++counts[0];
        if (outcome.stage == Stage::FormClosureFailed) continue;
        ++counts[1];
        if (outcome.stage == Stage::SchurSingular) {
          ++local.stats.schur_singular;
          local.schur_singular.push_back(taut);
          continue;
        }
        if (outcome.stage == Stage::HeightInfeasible || outcome.stage == Stage::SlackViolated) continue;
        ++counts[2];
        if (outcome.stage != Stage::Accepted) continue;
        ++counts[3];
        ++local.stats.by_k[taut.k()];
        local.solutions.push_back(std::move(*outcome.solution));
      }
    }
    std::lock_guard lock(merge_mutex);
    result.stats.merge(local.stats);
    std::move(local.solutions.begin(), local.solutions.end(), std::back_inserter(result.solutions));
    std::move(local.schur_singular.begin(), local.schur_singular.end(),
              std::back_inserter(result.schur_singular));
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::sort(result.solutions.begin(), result.solutions.end(),
            [](const Solution& a, const Solution& b) { return a.taut_set < b.taut_set; });
  std::sort(result.schur_singular.begin(), result.schur_singular.end());

  if (options.classify_stability) {
    for (auto& s : result.solutions) s.stability = classify_solution(scene, s, options.probe_radius);
  }
  result.stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

FkResult solve_fk(const RawScene& raw, const FkOptions& options) {
  ValidationResult v = validate_scene(raw, options.tol);
  if (!v.ok()) throw InfeasibleFormation(std::move(v.violations));
  return solve_fk(*v.scene, options);
}

const Solution& lowest_energy(const std::vector<Solution>& solutions) {
  if (solutions.empty()) throw EmptySolutionSet();
  const Solution* best = &solutions.front();
  for (const auto& s : solutions) {
    const double dz = s.p_o.z() - best->p_o.z();
    if (dz < -1e-9 || (std::abs(dz) <= 1e-9 && s.taut_set < best->taut_set)) best = &s;
  }
  return *best;
}

std::vector<std::vector<std::size_t>> cluster_solutions(const std::vector<Solution>& solutions,
                                                        double tol) {
  const size_t m = solutions.size();
  std::vector<size_t> parent(m);
  for (size_t i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      const double d = std::max((solutions[i].p_o - solutions[j].p_o).cwiseAbs().maxCoeff(),
                                (solutions[i].v_o - solutions[j].v_o).cwiseAbs().maxCoeff());
      if (d <= tol) {
        const size_t a = find(i), b = find(j);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<size_t>> groups;
  std::vector<long> slot(m, -1);
  for (size_t i = 0; i < m; ++i) {
    const size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<size_t>(slot[root])].push_back(i);
  }
  return groups;
}

namespace {

std::string radii_message(double r_s, double r_f) {
  std::ostringstream os;
  os << "regular polygon radii need 0 < r_f < r_s (got r_s = " << r_s << ", r_f = " << r_f << ")";
  return os.str();
}

}  // namespace

InvalidRadii::InvalidRadii(double r_s, double r_f) : std::invalid_argument(radii_message(r_s, r_f)) {}

Scene regular_polygon_scene(int n, double r_s, double r_f, double z_r) {
  if (!(r_f > 0.0 && r_f < r_s)) throw InvalidRadii(r_s, r_f);
  RawScene raw;
  raw.z_r = z_r;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    const Vec2 u(std::cos(t), std::sin(t));
    raw.sheet_vertices.push_back(r_s * u);
    raw.robots.push_back(r_f * u);
  }
  return make_scene(raw);
}

}  // namespace vvcm
