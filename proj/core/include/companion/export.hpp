// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/canvas.hpp>

#include <string>

namespace companion
{

/// Fixed three-decimal rendering used by every text export; "-0.000" is
/// normalised to "0.000".
std::string format_coord(double value);

/// SVG 1.1 document, one stroke-only path per polyline, grouped by element.
/// Equal canvases give byte-identical output.
std::string export_svg(const CanvasState& canvas);

/// Pen-plotter program: "U x y" travels with the pen up, "D x y" draws.
/// Each stroke becomes one U followed by its D moves; the program ends
/// with a U at the last position. An empty canvas parks at the margin corner.
std::string export_pen_program(const CanvasState& canvas);

} // namespace companion
