#include "vvcm/scene_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vvcm/results.hpp"

namespace vvcm {

using nlohmann::json;

ParseError::ParseError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : "field '" + field + "': " + message),
      field_(std::move(field)) {}

namespace {

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(field, "missing");
  return *it;
}

double number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ParseError(field, "expected a number");
  return value.get<double>();
}

std::vector<Vec2> points(const json& value, const std::string& field, double scale) {
  if (!value.is_array()) throw ParseError(field, "expected an array of [x, y] pairs");
  std::vector<Vec2> out;
  for (size_t i = 0; i < value.size(); ++i) {
    const std::string where = field + "[" + std::to_string(i) + "]";
    const json& p = value[i];
    if (!p.is_array() || p.size() != 2) throw ParseError(where, "expected [x, y]");
    out.emplace_back(scale * number(p[0], where), scale * number(p[1], where));
  }
  return out;
}

double unit_scale(const json& doc) {
  auto it = doc.find("units");
  if (it == doc.end()) return 1.0;
  if (!it->is_string()) throw ParseError("units", "expected \"m\", \"cm\" or \"mm\"");
  const auto u = it->get<std::string>();
  if (u == "m") return 1.0;
  if (u == "cm") return 0.01;
  if (u == "mm") return 0.001;
  throw ParseError("units", "unknown unit '" + u + "' (expected m, cm or mm)");
}

}  // namespace

RawScene parse_scene_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "scene file must hold a JSON object");

  if (auto it = doc.find("version"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long>() != 1) throw ParseError("version", "only version 1 is supported");
  }
  const double scale = unit_scale(doc);

  const json& n_field = require(doc, "n");
  if (!n_field.is_number_integer()) throw ParseError("n", "expected an integer");
  const long n = n_field.get<long>();

  RawScene raw;
  const json& z_r = require(doc, "z_r");
  if (z_r.is_array()) {
    throw ParseError("z_r", "per-robot holding heights are not supported; give one uniform height");
  }
  raw.z_r = scale * number(z_r, "z_r");
  raw.sheet_vertices = points(require(doc, "sheet_vertices"), "sheet_vertices", scale);
  raw.robots = points(require(doc, "robots"), "robots", scale);
  if (static_cast<long>(raw.sheet_vertices.size()) != n) {
    throw ParseError("sheet_vertices", "holds " + std::to_string(raw.sheet_vertices.size()) +
                                           " points but n = " + std::to_string(n));
  }
  if (static_cast<long>(raw.robots.size()) != n) {
    throw ParseError("robots", "holds " + std::to_string(raw.robots.size()) + " points but n = " + std::to_string(n));
  }
  if (auto it = doc.find("object_mass"); it != doc.end()) raw.object_mass = number(*it, "object_mass");
  if (auto it = doc.find("gravity"); it != doc.end()) raw.gravity = number(*it, "gravity");
  return raw;
}

Scene parse_scene_file(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scene file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return make_scene(parse_scene_text(buf.str()), tol);
}

std::string write_scene_text(const RawScene& scene) {
  auto pts = [](const std::vector<Vec2>& p) {
    std::string s = "[";
    for (size_t i = 0; i < p.size(); ++i) {
      s += (i ? ", [" : "[") + format_number(p[i].x()) + ", " + format_number(p[i].y()) + "]";
    }
    return s + "]";
  };
  std::ostringstream out;
  out << "{\n"
      << "  \"version\": 1,\n"
      << "  \"units\": \"m\",\n"
      << "  \"n\": " << scene.robots.size() << ",\n"
      << "  \"z_r\": " << format_number(scene.z_r) << ",\n"
      << "  \"sheet_vertices\": " << pts(scene.sheet_vertices) << ",\n"
      << "  \"robots\": " << pts(scene.robots) << ",\n"
      << "  \"object_mass\": " << format_number(scene.object_mass) << ",\n"
      << "  \"gravity\": " << format_number(scene.gravity) << "\n"
      << "}\n";
  return out.str();
}

}  // namespace vvcm
