#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "vvcm/scene.hpp"
#include "vvcm/tolerances.hpp"

namespace vvcm {

/// Malformed scene file. `field()` names the offending JSON field, or is
/// empty for syntax errors (the message then carries the byte offset).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scene file, JSON:
///   { "version": 1, "units": "m" | "cm" | "mm", "n": N, "z_r": h,
///     "sheet_vertices": [[x, y], ...], "robots": [[x, y], ...],
///     "object_mass": kg, "gravity": m/s^2 }
/// `version` defaults to 1, `units` to "m". Lengths come back in meters.
RawScene parse_scene_text(std::string_view text);

/// Reads, unit-converts and validates. Throws IoError, ParseError or
/// ValidationError.
Scene parse_scene_file(const std::string& path, const Tolerances& tol = {});

/// Serializes in meters with 9 significant digits.
std::string write_scene_text(const RawScene& scene);

}  // namespace vvcm
