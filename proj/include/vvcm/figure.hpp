#pragma once

#include <string>
#include <vector>

#include "vvcm/engine.hpp"
#include "vvcm/scene.hpp"

namespace vvcm {

enum class FigureFormat { Pdf, Svg };

/// One page per solution: the world frame on the left (robots, taut cables
/// to r_o), the sheet frame on the right (polygon, v_o, taut chords). With
/// no solutions a single page shows the scene alone.
std::string render_figure(const Scene& scene, const std::vector<Solution>& solutions, FigureFormat format);

/// Picks PDF or SVG from the extension of `path` (".svg" gives SVG).
/// Throws IoError when the file cannot be written.
void emit_figure(const Scene& scene, const std::vector<Solution>& solutions, const std::string& path);

}  // namespace vvcm
