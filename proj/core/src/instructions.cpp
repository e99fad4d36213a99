// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/instructions.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace companion
{

void InstructionParams::check() const
{
    if (drawing_width <= 0 || drawing_height <= 0)
        throw Error(ErrorCode::BadConfig, "drawing size must be positive");
    if (!(workspace_width_mm > 0.0) || !(workspace_height_mm > 0.0))
        throw Error(ErrorCode::BadConfig, "workspace size must be positive");
    if (!(edge_margin >= 0.0) || !(element_buffer >= 0.0))
        throw Error(ErrorCode::BadConfig, "margin and buffer must be non-negative");
    if (2.0 * edge_margin >= std::min(drawing_width, drawing_height))
        throw Error(ErrorCode::BadConfig, "edge margin leaves no drawing area");
    if (!std::isfinite(min_mark_px()) || min_mark_px() <= 0.0)
        throw Error(ErrorCode::BadConfig, "derived minima must be positive");
}

ConstraintSet InstructionParams::constraints() const
{
    auto c = ConstraintSet {};
    c.width = drawing_width;
    c.height = drawing_height;
    c.edge_margin = edge_margin;
    c.element_buffer = element_buffer;
    c.max_element_height = max_element_height();
    c.min_line_len_px = min_mark_px();
    c.min_circle_diam_px = min_mark_px();
    c.min_text_height_px = min_mark_px();
    return c;
}

nlohmann::json to_json(const InstructionParams& params)
{
    return {
        { "drawing_size", { params.drawing_width, params.drawing_height } },
        { "workspace_mm", { params.workspace_width_mm, params.workspace_height_mm } },
        { "edge_margin", params.edge_margin },
        { "element_buffer", params.element_buffer },
    };
}

InstructionParams instruction_params_from_json(const nlohmann::json& doc)
{
    auto params = InstructionParams {};
    try
    {
        if (doc.contains("drawing_size"))
        {
            params.drawing_width = doc["drawing_size"].at(0).get<int>();
            params.drawing_height = doc["drawing_size"].at(1).get<int>();
        }
        if (doc.contains("workspace_mm"))
        {
            params.workspace_width_mm = doc["workspace_mm"].at(0).get<double>();
            params.workspace_height_mm = doc["workspace_mm"].at(1).get<double>();
        }
        params.edge_margin = doc.value("edge_margin", params.edge_margin);
        params.element_buffer = doc.value("element_buffer", params.element_buffer);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::BadConfig, fmt::format("instruction params: {}", e.what()));
    }
    params.check();
    return params;
}

std::string format_real(double value)
{
    auto text = fmt::format("{}", value);
    if (text.find_first_of(".eEn") == std::string::npos)
        text += ".0";
    return text;
}

std::string render_system_instructions(const InstructionParams& params)
{
    params.check();
    auto const minimum = format_real(params.min_mark_px());
    auto const margin = fmt::format("{}", params.edge_margin);
    auto const buffer = fmt::format("{}", params.element_buffer);

    auto out = std::string {};
    out += "You are an interactive imaginative story-telling robot with a planar robotic arm and a motorized pan "
           "and tilt camera to look at the drawing in progress or subjects.\n";
    out += "- As a context, you are given some examples of drawings and methods explaining how to draw them.\n";
    out += "- You should only slightly vary the proportions of the elements in the examples.\n";
    out += "- You respond to requests and comments.\n";
    out += "- Sometimes a human draws on your drawing.\n";
    out += "- You can request a human to draw on your drawing.\n";
    out += "- You can observe the drawing in progress, identify, and localize elements.\n";
    out += "- when you want to draw thicker elements, go over them several times with a little offset.\n";
    out += "- you like the slight asymmetry.\n";
    out += "- You don't ask about coordinates of elements, nor details on how to draw them.\n";
    out += fmt::format(
        "- When you draw you stay a minimum of {} pixels away from the edges of the drawing area.\n", margin);
    out += fmt::format("- you leave a buffer of at least {} pixels between new elements and existing elements.\n",
                       buffer);
    out += fmt::format("- the lines should never be less than {} pixels long\n", minimum);
    out += fmt::format("- the circles should be a minimum of {} pixels in diameter.\n", minimum);
    out += fmt::format("- the text should be a minimum of {} pixels high.\n", minimum);
    out += fmt::format("- the drawing area is: {} by {} pixels.\n", params.drawing_width, params.drawing_height);
    out += fmt::format(
        "- the elements' height that you are drawing should not exceed {} pixels unless it is requested.\n",
        params.max_element_height());
    out += "- people are represented as stick figures.\n";
    out += "- you use splines rather than segments for organic elements.\n";
    out += "- you have a knowledge of 2d line representations of most objects.\n";
    out += "- you know art history\n";
    out += "- for stories you are inspired by children's drawings and cave paintings for their narrative "
           "compositions.\n";
    return out;
}

} // namespace companion
