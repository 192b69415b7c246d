#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "vvcm/engine.hpp"
#include "vvcm/results.hpp"
#include "vvcm/scene_file.hpp"

using namespace vvcm;

namespace {

FkOptions quick() {
  FkOptions o;
  o.classify_stability = false;
  return o;
}

std::set<std::string> taut_sets(const FkResult& r) {
  std::set<std::string> out;
  for (const auto& s : r.solutions) out.insert(s.taut_set.to_string());
  return out;
}

bool inside_triangle_cover(const std::vector<Vec2>& pts, const Vec2& p, double margin) {
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      for (size_t k = j + 1; k < pts.size(); ++k) {
        const Vec2 a = pts[i], b = pts[j], c = pts[k];
        const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        if (std::abs(det) < 1e-15) continue;
        const double s = ((p - a).x() * (c - a).y() - (p - a).y() * (c - a).x()) / det;
        const double t = ((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x()) / det;
        if (s >= -margin && t >= -margin && s + t <= 1 + margin) return true;
      }
    }
  }
  return false;
}

Solution fake(std::vector<int> taut, int n, double z) {
  Solution s(TautSet(std::move(taut), n));
  s.p_o.z() = z;
  return s;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("taut-set counts") {
    CHECK(count_taut_sets(3) == 1);
    CHECK(count_taut_sets(8) == 219);
    CHECK(count_taut_sets(20) == 1048365);
    const auto three = enumerate_taut_sets(3);
    REQUIRE(three.size() == 1);
    CHECK(three.front().to_string() == "{1,2,3}");
  }

  TEST_CASE("enumeration order, ranks and ranges agree") {
    const int n = 9;
    const auto all = enumerate_taut_sets(n);
    REQUIRE(all.size() == count_taut_sets(n));
    for (size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);
    for (std::uint64_t r = 0; r < all.size(); r += 7) CHECK(unrank_taut_set(n, r) == all[r].indices());
    std::vector<std::vector<int>> pieces;
    for (std::uint64_t begin = 0; begin < all.size(); begin += 50) {
      TautSetStream stream(n, begin, std::min<std::uint64_t>(begin + 50, all.size()));
      std::vector<int> c;
      while (stream.next(c)) pieces.push_back(c);
    }
    REQUIRE(pieces.size() == all.size());
    for (size_t i = 0; i < all.size(); ++i) CHECK(pieces[i] == all[i].indices());
    CHECK_THROWS_AS(unrank_taut_set(n, all.size()), std::out_of_range);
  }

  TEST_CASE("four-robot scene") {
    const auto r = solve_fk(parse_scene_file(test::data_path("four_robot.json")), quick());
    CHECK(taut_sets(r) == std::set<std::string>{"{1,2,3}", "{1,3,4}", "{1,2,3,4}"});
    CHECK(lowest_energy(r.solutions).taut_set.to_string() == "{1,2,3}");
  }

  TEST_CASE("octagon scene") {
    const auto r = solve_fk(parse_scene_file(test::data_path("octagon_r4_refined.json")), quick());
    CHECK(taut_sets(r) ==
          std::set<std::string>{"{4,5,8}", "{1,5,7,8}", "{3,4,5,8}", "{3,5,7,8}", "{4,5,6,8}", "{1,3,5,7,8}"});
    const Solution& low = lowest_energy(r.solutions);
    CHECK(low.taut_set.to_string() == "{4,5,8}");
    CHECK(std::abs(low.p_o.z() - 0.2618) < 5e-4);
    CHECK(r.stats.counts[0] == 219);
  }

  TEST_CASE("step counts never increase") {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 10; ++t) {
      const Scene s = test::random_scene(rng, 4 + t % 5);
      const auto r = solve_fk(s, quick());
      CHECK(r.stats.counts[0] == count_taut_sets(s.n()));
      for (size_t i = 1; i < 4; ++i) CHECK(r.stats.counts[i] <= r.stats.counts[i - 1]);
      std::uint64_t hist = 0;
      for (const auto& [k, c] : r.stats.by_k) hist += c;
      CHECK(hist == r.solutions.size());
      CHECK(r.stats.counts[3] == r.solutions.size());
    }
  }

  TEST_CASE("every solution satisfies the geometry it claims") {
    std::mt19937_64 rng(52);
    for (int t = 0; t < 20; ++t) {
      const Scene s = test::random_scene(rng, 4 + t % 5);
      for (const auto& sol : solve_fk(s, quick()).solutions) {
        CHECK(sol.p_o.z() > 0.0);
        CHECK(sol.p_o.z() < s.z_r());
        CHECK(s.sheet_contains(sol.v_o));
        std::vector<Vec2> taut_robots;
        for (int i = 0; i < s.n(); ++i) {
          const double straight = (s.holding_point(i) - sol.p_o).norm();
          const double length = cable_length(s, sol.v_o, i);
          if (sol.taut_set.contains(i)) {
            CHECK(std::abs(straight - length) < 1e-7);
            taut_robots.push_back(s.robot(i));
          } else {
            CHECK(straight < length);
          }
        }
        CHECK(inside_triangle_cover(taut_robots, sol.p_o.head<2>(), 0.0));
        CHECK(std::abs(sol.energy - s.object_mass() * s.gravity() * sol.p_o.z()) < 1e-12);
      }
    }
  }

  TEST_CASE("thread count does not change the output") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 4; ++t) {
      const Scene s = test::random_scene(rng, 8);
      FkOptions one, many;
      one.threads = 1;
      many.threads = 3;
      const auto a = solve_fk(s, one);
      const auto b = solve_fk(s, many);
      CHECK(results_json(a.solutions, a.stats) == results_json(b.solutions, b.stats));
    }
  }

  TEST_CASE("randomly perturbed scenes never accept more than five taut cables") {
    std::mt19937_64 rng(54);
    for (int t = 0; t < 20; ++t) {
      for (const auto& sol : solve_fk(test::random_scene(rng, 6 + t % 3), quick()).solutions) {
        CHECK(sol.taut_set.k() <= 5);
      }
    }
  }

  TEST_CASE("infeasible formations are rejected before solving") {
    RawScene raw;
    raw.z_r = 1.0;
    raw.sheet_vertices = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    raw.robots = raw.sheet_vertices;
    CHECK_THROWS_AS(solve_fk(raw), InfeasibleFormation);
  }

  TEST_CASE("lowest energy") {
    CHECK_THROWS_AS(lowest_energy({}), EmptySolutionSet);
    const std::vector<Solution> one{fake({0, 1, 2}, 5, 0.4)};
    CHECK(&lowest_energy(one) == &one.front());
    const std::vector<Solution> tie{fake({0, 1, 2, 3}, 5, 0.3), fake({1, 2, 4}, 5, 0.3 + 5e-10),
                                    fake({0, 2, 3}, 5, 0.3)};
    CHECK(lowest_energy(tie).taut_set.to_string() == "{1,3,4}");
    const std::vector<Solution> lower{fake({0, 1, 2}, 5, 0.3), fake({0, 1, 2, 3}, 5, 0.2)};
    CHECK(lowest_energy(lower).taut_set.k() == 4);
  }

  TEST_CASE("clustering is transitive") {
    std::vector<Solution> sols{fake({0, 1, 2}, 5, 0.3), fake({0, 1, 3}, 5, 0.3008), fake({0, 1, 4}, 5, 0.3016),
                               fake({0, 2, 3}, 5, 0.5)};
    const auto groups = cluster_solutions(sols, 1e-3);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0] == std::vector<std::size_t>{0, 1, 2});
    CHECK(groups[1] == std::vector<std::size_t>{3});
    CHECK(cluster_solutions(sols, 1e-4).size() == 4);
  }

  TEST_CASE("regular polygons") {
    CHECK_THROWS_AS(regular_polygon_scene(6, 0.5, 0.5, 1.0), InvalidRadii);
    CHECK_THROWS_AS(regular_polygon_scene(6, 0.5, 0.0, 1.0), InvalidRadii);
    const auto r = solve_fk(regular_polygon_scene(8, 0.9, 0.5, 1.0));
    REQUIRE(r.solutions.size() == 1);
    const Solution& s = r.solutions.front();
    CHECK(s.taut_set.k() == 8);
    CHECK(std::abs(s.p_o.z() - 0.252) < 1e-3);
    CHECK(s.p_o.head<2>().norm() < 1e-9);
    CHECK(s.v_o.norm() < 1e-9);
    CHECK(s.stability == Stability::StrictLocalMin);
    const auto near = solve_fk(regular_polygon_scene(4, 1.0, 0.999, 1.0), quick());
    REQUIRE(near.solutions.size() == 1);
    CHECK(near.solutions.front().p_o.z() == doctest::Approx(1.0 - std::sqrt(1.0 - 0.999 * 0.999)));
  }
}
