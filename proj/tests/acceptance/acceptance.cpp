// Acceptance checks, one line per criterion. `--criterion N` runs a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "CLI11.hpp"
#include "support.hpp"
#include "vvcm/cqp.hpp"
#include "vvcm/engine.hpp"
#include "vvcm/oracle.hpp"
#include "vvcm/results.hpp"
#include "vvcm/scene_file.hpp"

namespace {

using namespace vvcm;
using test::data_path;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string counts_text(const StepStats& s) {
  std::ostringstream os;
  os << "(" << s.counts[0] << ", " << s.counts[1] << ", " << s.counts[2] << ", " << s.counts[3] << ")";
  return os.str();
}

std::string by_k_text(const StepStats& s, int k_max) {
  std::ostringstream os;
  os << "{";
  for (int k = 3; k <= k_max; ++k) {
    auto it = s.by_k.find(k);
    os << (k > 3 ? ", " : "") << k << ":" << (it == s.by_k.end() ? 0 : it->second);
  }
  os << "}";
  return os.str();
}

FkOptions quick() {
  FkOptions o;
  o.classify_stability = false;
  return o;
}

// The octagon fixtures place vertex i at angle 2 pi (i - 1) / 8; the other
// reading of the vertex numbering shifts every vertex by one eighth turn.
struct OctagonVariant {
  std::string label;
  Scene scene;
};

std::vector<OctagonVariant> octagon_variants() {
  std::vector<OctagonVariant> out;
  for (const char* file : {"octagon.json", "octagon_r4_refined.json"}) {
    const Scene base = parse_scene_file(data_path(file));
    out.push_back({std::string(file) + " phase i-1", base});
    RawScene raw = base.raw();
    const Eigen::Rotation2Dd eighth(std::numbers::pi / 4);
    for (auto& v : raw.sheet_vertices) v = eighth * v;
    out.push_back({std::string(file) + " phase i", make_scene(raw)});
  }
  return out;
}

Verdict octagon_counts() {
  Verdict v;
  std::ostringstream os;
  for (const auto& variant : octagon_variants()) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = solve_fk(variant.scene, quick());
    const double dt = seconds_since(t0);
    const bool match = r.stats.counts == std::array<std::uint64_t, 4>{219, 182, 22, 6} && dt < 1.0;
    v.pass = v.pass || match;
    os << variant.label << " " << counts_text(r.stats) << (match ? " matches" : "") << "; ";
  }
  v.detail = os.str() + "expected (219, 182, 22, 6)";
  return v;
}

struct Row {
  std::vector<int> taut;
  double v[2];  // mm
  double p[3];  // mm
};

const std::vector<Row> kOctagonRows = {
    {{4, 5, 8}, {-12.8, -13.0}, {-8.6, -30.5, 261.8}},
    {{1, 5, 7, 8}, {-14.8, -193.2}, {-26.6, -347.8, 310.2}},
    {{3, 4, 5, 8}, {16.4, -22.2}, {43.3, -46.9, 263.2}},
    {{3, 5, 7, 8}, {51.4, -165.0}, {98.7, -290.9, 300.5}},
    {{4, 5, 6, 8}, {-220.7, -76.7}, {-389.3, -142.0, 340.6}},
    {{1, 3, 5, 7, 8}, {-13.9, -193.3}, {-25.0, -348.0, 310.2}},
};

Verdict octagon_positions() {
  Verdict v;
  std::ostringstream os;
  for (const auto& variant : octagon_variants()) {
    const auto r = solve_fk(variant.scene, quick());
    std::vector<TautSet> expected;
    for (const auto& row : kOctagonRows) expected.push_back(TautSet::of_labels(row.taut, 8));
    std::sort(expected.begin(), expected.end());
    std::vector<TautSet> got;
    for (const auto& s : r.solutions) got.push_back(s.taut_set);
    double worst = 0.0;
    int matched = 0;
    for (const auto& row : kOctagonRows) {
      const auto it = std::find_if(r.solutions.begin(), r.solutions.end(), [&](const Solution& s) {
        return s.taut_set == TautSet::of_labels(row.taut, 8);
      });
      if (it == r.solutions.end()) continue;
      double err = 0.0;
      for (int a = 0; a < 2; ++a) err = std::max(err, std::abs(1000.0 * it->v_o(a) - row.v[a]));
      for (int a = 0; a < 3; ++a) err = std::max(err, std::abs(1000.0 * it->p_o(a) - row.p[a]));
      worst = std::max(worst, err);
      if (err <= 0.5) ++matched;
    }
    const bool pass = got == expected && matched == 6;
    v.pass = v.pass || pass;
    os << variant.label << ": " << r.solutions.size() << " solutions, " << matched
       << "/6 rows within 0.5 mm (worst " << worst << " mm)" << (got == expected ? "" : ", taut sets differ")
       << "; ";
  }
  v.detail = os.str();
  return v;
}

Verdict ring_counts() {
  struct Expect {
    const char* file;
    int n;
    std::array<std::uint64_t, 4> counts;
    std::map<int, std::uint64_t> by_k;
  };
  const std::vector<Expect> expect = {
      {"ring10_cm.json", 10, {968, 582, 34, 5}, {{4, 2}, {5, 3}}},
      {"ring15_cm.json", 15, {32647, 4823, 93, 2}, {{3, 1}, {4, 1}}},
      {"ring20_cm.json", 20, {1048365, 21489, 152, 13}, {{3, 1}, {4, 6}, {5, 6}}},
  };
  Verdict v{true, ""};
  std::ostringstream os;
  for (const auto& e : expect) {
    os << "N=" << e.n << ": ";
    try {
      const Scene scene = parse_scene_file(data_path(e.file));
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = solve_fk(scene, quick());
      const double dt = seconds_since(t0);
      const bool ok = r.stats.counts == e.counts && r.stats.by_k == e.by_k && (e.n != 20 || dt < 10.0);
      v.pass = v.pass && ok;
      os << counts_text(r.stats) << " " << by_k_text(r.stats, 5) << " in " << dt << " s" << (ok ? " ok" : " MISMATCH");
    } catch (const ValidationError& err) {
      v.pass = false;
      os << "invalid formation (" << err.violations().size() << " violations, first: "
         << err.violations().front().message() << ")";
    }
    os << "; ";
  }
  v.detail = os.str();
  return v;
}

Verdict four_robot() {
  struct Ref {
    std::vector<int> taut;
    double p[3];
    std::vector<double> lengths;  // per taut cable, in taut-set order
  };
  const std::vector<Ref> refs = {
      {{1, 2, 3}, {0.571, 0.320, 0.143}, {0.773, 0.752, 0.772}},
      {{1, 3, 4}, {0.566, 0.341, 0.144}, {0.776, 0.767, 0.766}},
      {{1, 2, 3, 4}, {0.462, 0.275, 0.158}, {0.706, 0.766, 0.827, 0.779}},
  };
  const Scene scene = parse_scene_file(data_path("four_robot.json"));
  const auto r = solve_fk(scene, quick());
  Verdict v{r.solutions.size() == 3, ""};
  std::ostringstream os;
  os.precision(3);
  os << std::fixed;
  for (const auto& ref : refs) {
    const auto it = std::find_if(r.solutions.begin(), r.solutions.end(), [&](const Solution& s) {
      return s.taut_set == TautSet::of_labels(ref.taut, 4);
    });
    if (it == r.solutions.end()) {
      v.pass = false;
      os << TautSet::of_labels(ref.taut, 4).to_string() << " missing; ";
      continue;
    }
    const double limit[3] = {7.0, 14.0, 7.0};
    os << it->taut_set.to_string() << " err%";
    for (int a = 0; a < 3; ++a) {
      const double e = 100.0 * (ref.p[a] - it->p_o(a)) / it->p_o(a);
      os << " " << e;
      if (std::abs(e) > limit[a]) {
        v.pass = false;
        os << "(!)";
      }
    }
    os << " len%";
    const auto& idx = it->taut_set.indices();
    for (size_t j = 0; j < idx.size(); ++j) {
      const double l = cable_length(scene, it->v_o, idx[j]);
      const double e = 100.0 * (ref.lengths[j] - l) / l;
      os << " " << e;
      if (std::abs(e) > 5.0) {
        v.pass = false;
        os << "(!)";
      }
    }
    os << "; ";
  }
  v.detail = std::to_string(r.solutions.size()) + " solutions; " + os.str();
  return v;
}

Verdict regular_polygons() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Verdict v{true, ""};
  double worst = 0.0;
  int runs = 0;
  for (int n = 3; n <= 12; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const double r_s = 0.3 + 1.7 * unit(rng);
      const double r_f = r_s * (0.05 + 0.9 * unit(rng));
      const double drop = std::sqrt(r_s * r_s - r_f * r_f);
      const double z_r = drop + 0.05 + 1.5 * unit(rng);
      const auto r = solve_fk(regular_polygon_scene(n, r_s, r_f, z_r), quick());
      ++runs;
      if (r.solutions.size() != 1 || r.solutions[0].taut_set.k() != n) {
        v.pass = false;
        v.detail += "n=" + std::to_string(n) + " gave " + std::to_string(r.solutions.size()) + " solutions; ";
        continue;
      }
      const auto& s = r.solutions[0];
      const double err = std::max({s.v_o.cwiseAbs().maxCoeff(), s.p_o.head<2>().cwiseAbs().maxCoeff(),
                                   std::abs(s.p_o.z() - (z_r - drop))});
      worst = std::max(worst, err);
      if (err > 1e-9) v.pass = false;
    }
  }
  const auto r = solve_fk(parse_scene_file(data_path("octagon_regular.json")), quick());
  const bool fig = r.solutions.size() == 1 && (r.solutions[0].p_o - Vec3(0, 0, 0.252)).cwiseAbs().maxCoeff() <= 1e-3;
  v.pass = v.pass && fig;
  std::ostringstream os;
  os << runs << " scenes, worst deviation " << worst << " m; octagon r_s=0.9 r_f=0.5: "
     << (r.solutions.empty() ? std::string("no solution") : "z_o = " + format_number(r.solutions[0].p_o.z()));
  v.detail = os.str() + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict relaxed_robot() {
  const Scene base = parse_scene_file(data_path("octagon_regular.json"));
  const Vec3 p_expected(0, 0, 1.0 - std::sqrt(0.81 - 0.25));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Verdict v{true, ""};
  int placed = 0;
  double worst = 0.0;
  while (placed < 5) {
    RawScene raw = base.raw();
    const double rho = 0.45 * std::sqrt(unit(rng));
    const double phi = 2 * std::numbers::pi * unit(rng);
    raw.robots[0] = rho * Vec2(std::cos(phi), std::sin(phi));
    auto checked = validate_scene(raw);
    if (!checked.ok()) continue;
    ++placed;
    const auto r = solve_fk(*checked.scene, quick());
    const auto it = std::find_if(r.solutions.begin(), r.solutions.end(), [](const Solution& s) {
      return s.taut_set == TautSet::of_labels({2, 3, 4, 5, 6, 7, 8}, 8);
    });
    std::ostringstream os;
    os << "r_1 = (" << format_number(raw.robots[0].x()) << ", " << format_number(raw.robots[0].y()) << "): "
       << r.solutions.size() << " solution(s)";
    if (it == r.solutions.end()) {
      v.pass = false;
      os << ", {2..8} missing";
    } else {
      const double err = std::max((it->p_o - p_expected).cwiseAbs().maxCoeff(), it->v_o.cwiseAbs().maxCoeff());
      worst = std::max(worst, err);
      if (err > 1e-6) v.pass = false;
    }
    v.detail += os.str() + "; ";
  }
  v.detail += "worst deviation " + format_number(worst) + " m";
  return v;
}

// Draws whose L has condition number above this are numerically rank
// deficient for a 1e-10 absolute comparison: a double-precision dense inverse
// is itself off by eps * cond(L) * max|L^-1| there, so they are redrawn.
constexpr double kMaxCondition = 1e3;

Verdict block_inverse() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  double worst_inverse = 0.0, worst_identity = 0.0;
  int redrawn = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k1 = 2 + trial % 3;
    Objective obj;
    obj.h = Vec4(2, 2, -2, -2).asDiagonal();
    RowMatrix4 a(k1, 4);
    Eigen::MatrixXd l;
    for (;;) {
      obj.c = Vec4(coord(rng), coord(rng), coord(rng), coord(rng));
      obj.f0 = coord(rng);
      for (int i = 0; i < k1; ++i) {
        for (int j = 0; j < 4; ++j) a(i, j) = coord(rng);
      }
      l = lagrange_matrix(obj, a);
      const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(l).singularValues();
      if (sv(0) <= kMaxCondition * sv(sv.size() - 1)) break;
      ++redrawn;
    }
    const Eigen::MatrixXd block = lagrange_block_inverse(obj, a).assemble();
    const Eigen::MatrixXd dense = l.fullPivLu().inverse();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(l.rows(), l.cols());
    worst_inverse = std::max(worst_inverse, (block - dense).cwiseAbs().maxCoeff());
    worst_identity = std::max(worst_identity, (l * block - eye).cwiseAbs().maxCoeff());
  }
  std::ostringstream os;
  os << "1000 matrices (" << redrawn << " redrawn with cond(L) > " << kMaxCondition
     << "), max |block - dense| = " << worst_inverse << ", max |L L^-1 - I| = " << worst_identity;
  return {worst_inverse <= 1e-10 && worst_identity <= 1e-10, os.str()};
}

Verdict pivot_invariance() {
  Verdict v{true, ""};
  std::ostringstream os;
  for (const char* file : {"four_robot.json", "octagon.json", "octagon_r4_refined.json"}) {
    const Scene scene = parse_scene_file(data_path(file));
    int sets = 0, mismatched = 0;
    double worst = 0.0;
    for (const auto& taut : enumerate_taut_sets(scene.n())) {
      ++sets;
      const auto ref = evaluate_taut_set(scene, taut);
      bool same = true;
      for (int pivot : taut.indices()) {
        const auto alt = evaluate_taut_set(scene, taut, pivot);
        if ((alt.stage == Stage::Accepted) != (ref.stage == Stage::Accepted)) same = false;
        if (alt.x.has_value() != ref.x.has_value()) {
          same = false;
        } else if (ref.x) {
          const double d = (*alt.x - *ref.x).cwiseAbs().maxCoeff() / std::max(1.0, ref.x->cwiseAbs().maxCoeff());
          worst = std::max(worst, d);
          if (d > 1e-9) same = false;
        }
      }
      if (!same) ++mismatched;
    }
    v.pass = v.pass && mismatched == 0;
    os << file << ": " << sets << " sets, " << mismatched << " differ, worst " << worst << "; ";
  }
  v.detail = os.str();
  return v;
}

Verdict oracle_agreement() {
  std::mt19937_64 rng(99);
  Verdict v{true, ""};
  int scenes = 0, checked = 0, missed = 0, global_bad = 0;
  double slowest = 0.0, worst_global = 0.0;
  std::ostringstream os;
  for (int s = 0; s < 50; ++s) {
    const int n = 4 + s % 5;
    const Scene scene = test::random_scene(rng, n);
    ++scenes;
    const auto fk = solve_fk(scene);
    const auto t0 = std::chrono::steady_clock::now();
    const auto eq = find_equilibria(scene);
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    if (dt >= 30.0) v.pass = false;
    for (const auto& sol : fk.solutions) {
      if (sol.stability != Stability::StrictLocalMin) continue;
      ++checked;
      const bool found = std::any_of(eq.begin(), eq.end(), [&](const Equilibrium& e) {
        return (e.x() - sol.x()).cwiseAbs().maxCoeff() <= 2e-3;
      });
      if (!found) {
        ++missed;
        v.pass = false;
        os << "scene " << s << " (N=" << n << "): " << sol.taut_set.to_string() << " not found; ";
      }
    }
    const bool engine_empty = fk.solutions.empty();
    const bool oracle_empty = eq.empty() || eq.front().ground_contact;
    if (engine_empty != oracle_empty) {
      ++global_bad;
      v.pass = false;
      os << "scene " << s << ": engine " << fk.solutions.size() << " solutions, oracle " << eq.size() << "; ";
    } else if (!engine_empty) {
      const double d = std::abs(eq.front().z_min - lowest_energy(fk.solutions).p_o.z());
      worst_global = std::max(worst_global, d);
      if (d > 1e-3) {
        ++global_bad;
        v.pass = false;
        os << "scene " << s << ": lowest height differs by " << d << " m; ";
      }
    }
  }
  std::ostringstream head;
  head << scenes << " scenes, " << checked << " strict minima checked, " << missed << " missed, " << global_bad
       << " global mismatches (worst " << worst_global << " m), slowest oracle " << slowest << " s";
  v.detail = head.str() + (os.str().empty() ? "" : "; " + os.str());
  return v;
}

Verdict determinism() {
  Verdict v{true, ""};
  int compared = 0;
  // ring15_cm.json does not validate, so it has no output to compare.
  for (const char* file :
       {"four_robot.json", "octagon.json", "octagon_r4_refined.json", "ring10_cm.json", "ring20_cm.json"}) {
    const Scene scene = parse_scene_file(data_path(file));
    FkOptions one;
    one.threads = 1;
    FkOptions many;
    many.threads = 4;
    const auto a = solve_fk(scene, one);
    const auto b = solve_fk(scene, many);
    const auto c = solve_fk(scene, one);
    const std::string ja = results_json(a.solutions, a.stats);
    const bool same = ja == results_json(b.solutions, b.stats) && ja == results_json(c.solutions, c.stats);
    ++compared;
    if (!same) {
      v.pass = false;
      v.detail += std::string(file) + " differs; ";
    }
  }
  v.detail = std::to_string(compared) + " scenes run three times (1, 4, 1 threads)" +
             (v.detail.empty() ? ", byte-identical JSON" : "; " + v.detail);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run only criterion N")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "octagon step counts", octagon_counts},
      {2, "octagon solution positions", octagon_positions},
      {3, "ring scenes step counts and histograms", ring_counts},
      {4, "four-robot scene solutions and measured positions", four_robot},
      {5, "regular polygon unique solution", regular_polygons},
      {6, "regular octagon with robot 1 relaxed", relaxed_robot},
      {7, "Lagrange block inverse numerics", block_inverse},
      {8, "pivot invariance", pivot_invariance},
      {9, "oracle agreement on random scenes", oracle_agreement},
      {10, "deterministic output", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << (c.id < 10 ? "0" : "") << c.id << "] " << c.name << ": "
              << v.detail << std::endl;
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
