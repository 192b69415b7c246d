#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vvcm/engine.hpp"
#include "vvcm/oracle.hpp"
#include "vvcm/results.hpp"
#include "vvcm/scene_file.hpp"

namespace py = pybind11;
using namespace vvcm;

namespace {

Scene scene_from(const std::vector<Vec2>& sheet_vertices, const std::vector<Vec2>& robots, double z_r,
                 double object_mass, double gravity) {
  RawScene raw;
  raw.sheet_vertices = sheet_vertices;
  raw.robots = robots;
  raw.z_r = z_r;
  raw.object_mass = object_mass;
  raw.gravity = gravity;
  return make_scene(raw);
}

py::dict stats_dict(const StepStats& s) {
  py::dict d;
  d["counts"] = std::vector<std::uint64_t>(s.counts.begin(), s.counts.end());
  d["by_k"] = s.by_k;
  d["schur_singular"] = s.schur_singular;
  d["wall_time"] = s.wall_time;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Forward kinematics of robots holding a flexible sheet";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::enum_<Stability>(m, "Stability")
      .value("StrictLocalMin", Stability::StrictLocalMin)
      .value("Saddle", Stability::Saddle)
      .value("Degenerate", Stability::Degenerate);

  py::class_<Scene>(m, "Scene")
      .def(py::init(&scene_from), py::arg("sheet_vertices"), py::arg("robots"), py::arg("z_r"),
           py::arg("object_mass") = 1.0, py::arg("gravity") = 9.81)
      .def_property_readonly("n", &Scene::n)
      .def_property_readonly("z_r", &Scene::z_r)
      .def_property_readonly("object_mass", &Scene::object_mass)
      .def_property_readonly("gravity", &Scene::gravity)
      .def_property_readonly("sheet_vertices", &Scene::sheet_vertices)
      .def_property_readonly("robots", &Scene::robots)
      .def("__repr__", [](const Scene& s) { return "<Scene n=" + std::to_string(s.n()) + ">"; });

  py::class_<Solution>(m, "Solution")
      .def_property_readonly("taut_set", [](const Solution& s) { return s.taut_set.labels(); })
      .def_readonly("p_o", &Solution::p_o)
      .def_readonly("v_o", &Solution::v_o)
      .def_readonly("energy", &Solution::energy)
      .def_readonly("tensions", &Solution::tensions)
      .def_readonly("slack_margins", &Solution::slack_margins)
      .def_readonly("k1", &Solution::k1)
      .def_property_readonly("pivot", [](const Solution& s) { return s.pivot + 1; })
      .def_readonly("stability", &Solution::stability)
      .def("__repr__", [](const Solution& s) {
        return "<Solution " + s.taut_set.to_string() + " z_o=" + format_number(s.p_o.z()) + ">";
      });

  py::class_<FkResult>(m, "FkResult")
      .def_readonly("solutions", &FkResult::solutions)
      .def_property_readonly("stats", [](const FkResult& r) { return stats_dict(r.stats); })
      .def("to_json", [](const FkResult& r) { return results_json(r.solutions, r.stats); })
      .def("to_csv", [](const FkResult& r) { return results_csv(r.solutions); });

  py::class_<Equilibrium>(m, "Equilibrium")
      .def_readonly("v_o", &Equilibrium::v_o)
      .def_readonly("r_o", &Equilibrium::r_o)
      .def_readonly("z_min", &Equilibrium::z_min)
      .def_property_readonly("active_set", [](const Equilibrium& e) { return to_labels(e.active_set); })
      .def_readonly("ground_contact", &Equilibrium::ground_contact);

  m.def("load_scene", [](const std::string& path) { return parse_scene_file(path); }, py::arg("path"));
  m.def("regular_polygon_scene", &regular_polygon_scene, py::arg("n"), py::arg("r_s"), py::arg("r_f"),
        py::arg("z_r"));
  m.def(
      "solve_fk",
      [](const Scene& scene, unsigned threads, bool classify_stability) {
        FkOptions o;
        o.threads = threads;
        o.classify_stability = classify_stability;
        py::gil_scoped_release release;
        return solve_fk(scene, o);
      },
      py::arg("scene"), py::arg("threads") = 0, py::arg("classify_stability") = true);
  m.def(
      "lowest_energy", [](const FkResult& r) { return lowest_energy(r.solutions); }, py::arg("result"));
  m.def(
      "envelope_at",
      [](const Scene& scene, const Vec2& v_o, const Vec2& r_o) -> py::object {
        const auto e = envelope_at(scene, v_o, r_o);
        if (!e) return py::none();
        return py::make_tuple(e->z_min, to_labels(e->active_set));
      },
      py::arg("scene"), py::arg("v_o"), py::arg("r_o"));
  m.def(
      "find_equilibria",
      [](const Scene& scene, int grid_points) {
        OracleOptions o;
        o.grid_points = grid_points;
        py::gil_scoped_release release;
        return find_equilibria(scene, o);
      },
      py::arg("scene"), py::arg("grid_points") = 25);
}
