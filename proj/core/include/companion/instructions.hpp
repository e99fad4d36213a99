// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/canvas.hpp>

#include <nlohmann/json.hpp>

#include <string>

namespace companion
{

/// Page and workspace dimensions the instructions are rendered from.
/// `scale` is millimetres of paper per canvas pixel.
struct InstructionParams
{
    int drawing_width = 1200;
    int drawing_height = 900;
    double workspace_width_mm = 170.0;
    double workspace_height_mm = 130.0;
    double edge_margin = 30.0;
    double element_buffer = 40.0;

    friend bool operator==(const InstructionParams&, const InstructionParams&) = default;

    [[nodiscard]] double scale() const { return workspace_width_mm / drawing_width; }
    /// Smallest mark the pen can render legibly: 10 mm expressed in px.
    [[nodiscard]] double min_mark_px() const { return 10.0 / scale(); }
    [[nodiscard]] int max_element_height() const { return static_cast<int>(drawing_height / 3.0); }

    void check() const;
    [[nodiscard]] ConstraintSet constraints() const;
};

nlohmann::json to_json(const InstructionParams& params);
InstructionParams instruction_params_from_json(const nlohmann::json& doc);

/// Shortest round-trip decimal, with a trailing ".0" for integral values
/// (the way Python's str() prints floats).
std::string format_real(double value);

/// System instructions with every numeric slot filled in. Byte-stable.
std::string render_system_instructions(const InstructionParams& params);

} // namespace companion
