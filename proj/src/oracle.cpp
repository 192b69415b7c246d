#include "vvcm/oracle.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <utility>

namespace vvcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Envelope height only; +inf where infeasible.
double envelope_height(const Scene& scene, const Vec4& x) {
  const Vec2 r_o = x.head<2>();
  const Vec2 v_o = x.tail<2>();
  if (!scene.sheet_contains(v_o)) return kInf;
  double z = -kInf;
  for (int i = 0; i < scene.n(); ++i) {
    const double reach = (scene.vertex(i) - v_o).squaredNorm() - (scene.robot(i) - r_o).squaredNorm();
    if (reach < 0.0) return kInf;
    z = std::max(z, scene.z_r() - std::sqrt(reach));
  }
  return z;
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(w, jobs)));
}

template <class Fn>
void parallel_for(std::size_t jobs, unsigned threads, Fn fn) {
  const unsigned workers = worker_count(threads, jobs);
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs;) fn(j);
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
}

struct Grid {
  std::array<int, 4> count{};
  Vec4 lo = Vec4::Zero();
  Vec4 step = Vec4::Zero();

  std::size_t size() const {
    return static_cast<std::size_t>(count[0]) * count[1] * count[2] * count[3];
  }
  Vec4 point(const std::array<int, 4>& i) const {
    Vec4 x;
    for (int a = 0; a < 4; ++a) x(a) = lo(a) + step(a) * i[static_cast<size_t>(a)];
    return x;
  }
  std::array<int, 4> unflatten(std::size_t flat) const {
    std::array<int, 4> i{};
    for (int a = 3; a >= 0; --a) {
      i[static_cast<size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(count[static_cast<size_t>(a)]));
      flat /= static_cast<std::size_t>(count[static_cast<size_t>(a)]);
    }
    return i;
  }
  std::size_t flatten(const std::array<int, 4>& i) const {
    std::size_t flat = 0;
    for (int a = 0; a < 4; ++a) flat = flat * static_cast<std::size_t>(count[static_cast<size_t>(a)]) + static_cast<std::size_t>(i[static_cast<size_t>(a)]);
    return flat;
  }
};

// Axes: (r_x, r_y) over the formation's bounding box, (v_x, v_y) over the sheet's.
Grid make_grid(const Scene& scene, const std::array<int, 4>& count) {
  Grid g;
  g.count = count;
  auto box = [](const std::vector<Vec2>& pts, Vec2& lo, Vec2& hi) {
    lo = hi = pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  };
  Vec2 rlo, rhi, vlo, vhi;
  box(scene.robots(), rlo, rhi);
  box(scene.sheet_vertices(), vlo, vhi);
  const Vec4 lo(rlo.x(), rlo.y(), vlo.x(), vlo.y());
  const Vec4 hi(rhi.x(), rhi.y(), vhi.x(), vhi.y());
  g.lo = lo;
  for (int a = 0; a < 4; ++a) {
    const int c = count[static_cast<size_t>(a)];
    g.step(a) = c > 1 ? (hi(a) - lo(a)) / (c - 1) : 0.0;
    if (c == 1) g.lo(a) = 0.5 * (lo(a) + hi(a));
  }
  return g;
}

Eigen::Matrix4d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Matrix4d m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = normal(rng);
  return Eigen::HouseholderQR<Eigen::Matrix4d>(m).householderQ();
}

struct Descent {
  Vec4 x;
  double z;
};

// Pattern search with a freshly rotated orthogonal poll basis at every
// iteration, so creases of the envelope do not trap the iterate.
Descent pattern_search(const Scene& scene, Vec4 x, double z, double h0, double h_min,
                       std::mt19937_64& rng) {
  constexpr int kFailsBeforeShrink = 3;
  constexpr long kMaxEvaluations = 200000;
  double h = h0;
  int fails = 0;
  long evaluations = 0;
  while (h >= h_min && evaluations < kMaxEvaluations) {
    const Eigen::Matrix4d q = random_rotation(rng);
    Vec4 best_x = x;
    double best_z = z;
    for (int j = 0; j < 8; ++j) {
      const Vec4 d = (j < 4 ? 1.0 : -1.0) * q.col(j % 4);
      const Vec4 y = x + h * d;
      const double zy = envelope_height(scene, y);
      ++evaluations;
      if (zy < best_z) {
        best_z = zy;
        best_x = y;
      }
    }
    if (best_z < z) {
      x = best_x;
      z = best_z;
      h = std::min(2.0 * h, h0);
      fails = 0;
    } else if (++fails >= kFailsBeforeShrink) {
      h *= 0.5;
      fails = 0;
    }
  }
  return {x, z};
}

// Log-sum-exp smoothing of the envelope at temperature mu; +inf when infeasible.
double smoothed_height(const Scene& scene, const Vec4& x, double mu, Vec4* grad) {
  const Vec2 r_o = x.head<2>();
  const Vec2 v_o = x.tail<2>();
  if (!scene.sheet_contains(v_o)) return kInf;
  const int n = scene.n();
  std::vector<double> g(static_cast<size_t>(n));
  std::vector<Vec4> dg(static_cast<size_t>(n));
  double top = -kInf;
  for (int i = 0; i < n; ++i) {
    const Vec2 dr = scene.robot(i) - r_o;
    const Vec2 dv = scene.vertex(i) - v_o;
    const double reach = dv.squaredNorm() - dr.squaredNorm();
    if (!(reach > 0.0)) return kInf;
    const double root = std::sqrt(reach);
    g[static_cast<size_t>(i)] = scene.z_r() - root;
    dg[static_cast<size_t>(i)] << -dr / root, dv / root;
    top = std::max(top, g[static_cast<size_t>(i)]);
  }
  double sum = 0.0;
  Vec4 acc = Vec4::Zero();
  for (int i = 0; i < n; ++i) {
    const double w = std::exp((g[static_cast<size_t>(i)] - top) / mu);
    sum += w;
    acc += w * dg[static_cast<size_t>(i)];
  }
  if (grad) *grad = acc / sum;
  return top + mu * std::log(sum);
}

constexpr double kSmoothStep = 1e-3;  // m

// BFGS on the smoothed envelope with a decreasing temperature. The creases
// where several cables are taut at once stall a pure pattern search.
Vec4 smoothed_descent(const Scene& scene, Vec4 x, double max_step) {
  Eigen::Matrix4d inv_h = Eigen::Matrix4d::Identity() * 1e-2;
  for (double mu = 1e-5; mu >= 1e-10; mu *= 0.1) {
    Vec4 grad;
    double fx = smoothed_height(scene, x, mu, &grad);
    if (!std::isfinite(fx)) return x;
    for (int iter = 0; iter < 200 && grad.norm() > 1e-12; ++iter) {
      Vec4 dir = -inv_h * grad;
      if (!(dir.dot(grad) < 0.0)) {
        inv_h = Eigen::Matrix4d::Identity() * 1e-2;
        dir = -inv_h * grad;
      }
      // Stay in the current basin.
      const double len = dir.cwiseAbs().maxCoeff();
      if (len > max_step) dir *= max_step / len;
      double t = 1.0;
      Vec4 y;
      Vec4 grad_y;
      double fy = kInf;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        y = x + t * dir;
        fy = smoothed_height(scene, y, mu, &grad_y);
        if (fy <= fx + 1e-4 * t * dir.dot(grad)) break;
      }
      if (!(fy < fx)) break;
      const Vec4 s = y - x;
      const Vec4 q = grad_y - grad;
      const double sq = s.dot(q);
      if (sq > 1e-300) {
        const Eigen::Matrix4d eye = Eigen::Matrix4d::Identity();
        inv_h = (eye - s * q.transpose() / sq) * inv_h * (eye - q * s.transpose() / sq) +
                s * s.transpose() / sq;
      }
      x = y;
      fx = fy;
      grad = grad_y;
      if (s.cwiseAbs().maxCoeff() < 1e-13) break;
    }
  }
  return x;
}

std::vector<Equilibrium> run_oracle(const Scene& scene, const Grid& grid, const OracleOptions& options) {
  const std::size_t total = grid.size();
  std::vector<double> values(total);
  const std::size_t slab = static_cast<std::size_t>(grid.count[1]) * grid.count[2] * grid.count[3];
  parallel_for(static_cast<std::size_t>(grid.count[0]), options.threads, [&](std::size_t i0) {
    for (std::size_t f = i0 * slab; f < (i0 + 1) * slab; ++f) {
      values[f] = envelope_height(scene, grid.point(grid.unflatten(f)));
    }
  });

  // Seeds: finite grid values not exceeded by any axis neighbour (ties
  // resolved towards the lower flat index).
  std::vector<std::size_t> seeds;
  for (std::size_t f = 0; f < total; ++f) {
    const double z = values[f];
    if (!std::isfinite(z)) continue;
    const auto idx = grid.unflatten(f);
    bool minimum = true;
    for (int a = 0; a < 4 && minimum; ++a) {
      for (int s : {-1, 1}) {
        auto nb = idx;
        nb[static_cast<size_t>(a)] += s;
        if (nb[static_cast<size_t>(a)] < 0 || nb[static_cast<size_t>(a)] >= grid.count[static_cast<size_t>(a)]) continue;
        const std::size_t g = grid.flatten(nb);
        if (values[g] < z || (values[g] == z && g < f)) {
          minimum = false;
          break;
        }
      }
    }
    if (minimum) seeds.push_back(f);
  }

  const double h0 = std::max(grid.step.maxCoeff(), 10.0 * options.final_step);
  std::vector<Descent> ends(seeds.size());
  parallel_for(seeds.size(), options.threads, [&](std::size_t s) {
    std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL * (s + 1));
    const std::size_t f = seeds[s];
    Descent d = pattern_search(scene, grid.point(grid.unflatten(f)), values[f], h0, options.final_step, rng);
    const Vec4 x = smoothed_descent(scene, d.x, kSmoothStep);
    const double z = envelope_height(scene, x);
    if (z < d.z) d = {x, z};
    ends[s] = d;
  });

  std::sort(ends.begin(), ends.end(), [](const Descent& a, const Descent& b) {
    if (a.z != b.z) return a.z < b.z;
    return std::lexicographical_compare(a.x.data(), a.x.data() + 4, b.x.data(), b.x.data() + 4);
  });
  std::vector<Equilibrium> out;
  for (const auto& d : ends) {
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Equilibrium& e) {
      return (e.x() - d.x).cwiseAbs().maxCoeff() <= options.merge_tol;
    });
    if (duplicate) continue;
    Equilibrium e;
    e.r_o = d.x.head<2>();
    e.v_o = d.x.tail<2>();
    e.z_min = d.z;
    if (auto env = envelope_at(scene, e.v_o, e.r_o, 1e-5)) e.active_set = env->active_set;
    e.ground_contact = e.z_min <= 0.0;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

std::optional<EnvelopeValue> envelope_at(const Scene& scene, const Vec2& v_o, const Vec2& r_o,
                                         double active_tol) {
  if (!scene.sheet_contains(v_o)) return std::nullopt;
  std::vector<double> z(static_cast<size_t>(scene.n()));
  for (int i = 0; i < scene.n(); ++i) {
    const double reach = (scene.vertex(i) - v_o).squaredNorm() - (scene.robot(i) - r_o).squaredNorm();
    if (reach < 0.0) return std::nullopt;
    z[static_cast<size_t>(i)] = scene.z_r() - std::sqrt(reach);
  }
  EnvelopeValue out;
  out.z_min = *std::max_element(z.begin(), z.end());
  for (int i = 0; i < scene.n(); ++i) {
    if (z[static_cast<size_t>(i)] >= out.z_min - active_tol) out.active_set.push_back(i);
  }
  return out;
}

std::vector<Equilibrium> find_equilibria(const Scene& scene, const OracleOptions& options) {
  const int c = std::max(2, options.grid_points);
  return run_oracle(scene, make_grid(scene, {c, c, c, c}), options);
}

std::vector<Equilibrium> find_equilibria(const Scene& scene, double coarse_resolution,
                                         OracleOptions options) {
  if (!(coarse_resolution > 0.0)) throw std::invalid_argument("oracle grid resolution must be positive");
  const Grid unit = make_grid(scene, {2, 2, 2, 2});
  std::array<int, 4> count{};
  for (int a = 0; a < 4; ++a) {
    count[static_cast<size_t>(a)] = std::max(2, static_cast<int>(std::ceil(unit.step(a) / coarse_resolution)) + 1);
  }
  return run_oracle(scene, make_grid(scene, count), options);
}

Stability classify_solution(const Scene& scene, const Solution& solution, double probe_radius) {
  constexpr double kHeightTol = 1e-9;
  constexpr int kRandomProbes = 64;
  const Vec4 x0 = solution.x();
  const double z0 = envelope_height(scene, x0);
  if (!std::isfinite(z0)) return Stability::Degenerate;

  std::vector<Vec4> dirs;
  for (int a = 0; a < 4; ++a) {
    for (double s : {1.0, -1.0}) dirs.push_back(s * Vec4::Unit(a));
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (double sa : {1.0, -1.0}) {
        for (double sb : {1.0, -1.0}) dirs.push_back((sa * Vec4::Unit(a) + sb * Vec4::Unit(b)) / std::sqrt(2.0));
      }
    }
  }
  std::mt19937_64 rng(0x70be5ULL);
  std::normal_distribution<double> normal;
  for (int j = 0; j < kRandomProbes; ++j) {
    Vec4 d;
    for (int a = 0; a < 4; ++a) d(a) = normal(rng);
    dirs.push_back(d.normalized());
  }

  bool any_feasible = false;
  bool flat = false;
  std::vector<std::pair<double, Vec4>> feasible;
  for (const auto& d : dirs) {
    const double z = envelope_height(scene, x0 + probe_radius * d);
    if (!std::isfinite(z)) continue;
    any_feasible = true;
    if (z < z0 - kHeightTol) return Stability::Saddle;
    if (z <= z0 + kHeightTol) flat = true;
    feasible.emplace_back(z, d);
  }
  if (!any_feasible) return Stability::Degenerate;

  // Descent cones at multi-cable creases can be narrower than the probe
  // spacing, so minimise over the shell from the lowest probes.
  constexpr int kShellStarts = 4;
  std::sort(feasible.begin(), feasible.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const int starts = std::min<int>(kShellStarts, static_cast<int>(feasible.size()));
  for (int s = 0; s < starts; ++s) {
    auto [z, d] = feasible[static_cast<size_t>(s)];
    for (double h = 0.5; h >= 1e-5;) {
      const Eigen::Matrix4d q = random_rotation(rng);
      bool moved = false;
      for (int j = 0; j < 8 && !moved; ++j) {
        const Vec4 e = (j < 4 ? 1.0 : -1.0) * q.col(j % 4);
        const Vec4 t = (d + h * (e - e.dot(d) * d)).normalized();
        const double zt = envelope_height(scene, x0 + probe_radius * t);
        if (zt < z) {
          z = zt;
          d = t;
          moved = true;
        }
      }
      if (z < z0 - kHeightTol) return Stability::Saddle;
      if (!moved) h *= 0.5;
    }
    if (z <= z0 + kHeightTol) flat = true;
  }
  if (flat) return Stability::Degenerate;
  return Stability::StrictLocalMin;
}

}  // namespace vvcm
