// SPDX-License-Identifier: Apache-2.0
#include <companion/dispatch.hpp>
#include <companion/draw_tools.hpp>
#include <companion/error.hpp>
#include <companion/tool_schema.hpp>

#include <fmt/format.h>

namespace companion
{

namespace
{

using json = nlohmann::json;

Point point_of(const json& v)
{
    return { v.at(0).get<double>(), v.at(1).get<double>() };
}

std::vector<Point> points_of(const json& v)
{
    auto out = std::vector<Point> {};
    out.reserve(v.size());
    for (auto const& p: v)
        out.push_back(point_of(p));
    return out;
}

[[noreturn]] void violation(ViolationKind kind, double measured, double limit, std::string message)
{
    auto report = ValidationReport {};
    report.violations.push_back({ kind, {}, measured, limit });
    throw Error(ErrorCode::ConstraintViolation, std::move(message), report.to_json());
}

void append(std::vector<Polyline>& out, std::vector<Polyline> more)
{
    for (auto& p: more)
        out.push_back(std::move(p));
}

std::vector<Polyline> run_tool(const std::string& name, const json& args, const ConstraintSet& limits, RandomSource& rng)
{
    auto out = std::vector<Polyline> {};

    if (name == "draw-segments")
    {
        auto segments = std::vector<Segment> {};
        for (auto const& s: args["segments"])
            segments.push_back({ point_of(s["start"]), point_of(s["end"]) });
        out = draw_segments(segments);
        for (auto const& s: segments)
            if (distance(s.start, s.end) < limits.min_line_len_px)
                violation(ViolationKind::min_line_length,
                          distance(s.start, s.end),
                          limits.min_line_len_px,
                          fmt::format("segment is {:.3f} px long, minimum is {:.3f} px",
                                      distance(s.start, s.end), limits.min_line_len_px));
    }
    else if (name == "draw-circles")
    {
        auto circles = std::vector<Circle> {};
        for (auto const& c: args["circles"])
            circles.push_back({ point_of(c["center"]), c["radius"].get<double>() });
        out = draw_circles(circles);
        for (auto const& c: circles)
            if (2.0 * c.radius < limits.min_circle_diam_px)
                violation(ViolationKind::min_circle_diameter,
                          2.0 * c.radius,
                          limits.min_circle_diam_px,
                          fmt::format("circle diameter is {:.3f} px, minimum is {:.3f} px",
                                      2.0 * c.radius, limits.min_circle_diam_px));
    }
    else if (name == "draw-splines")
    {
        for (auto const& s: args["splines"])
            out.push_back(draw_splines(points_of(s["keypoints"])));
    }
    else if (name == "draw-path")
    {
        out.push_back(draw_path(points_of(args["keypoints"])));
    }
    else if (name == "draw-text")
    {
        auto const height = args["height"].get<double>();
        out = draw_text(args["text"].get<std::string>(), point_of(args["origin"]), height);
        if (height < limits.min_text_height_px)
            violation(ViolationKind::min_text_height,
                      height,
                      limits.min_text_height_px,
                      fmt::format("text height is {:.3f} px, minimum is {:.3f} px", height, limits.min_text_height_px));
    }
    else if (name == "draw-scribbles")
    {
        out = draw_scribbles(Polygon(points_of(args["polygon"])), Density(args["density"].get<double>()), rng);
    }
    else if (name == "draw-hatching")
    {
        out = draw_hatching(Polygon(points_of(args["polygon"])),
                            Density(args["density"].get<double>()),
                            args.value("angle", 45.0),
                            args.value("cross", false));
    }
    else if (name == "draw-scribbly-splines")
    {
        auto const style = ScribbleStyle { args.value("amplitude", 6.0), args.value("wavelength", 14.0) };
        for (auto const& s: args["splines"])
            out.push_back(draw_scribbly_splines(points_of(s["keypoints"]), style, rng));
    }

    if (args.contains("passes"))
    {
        auto const passes = args["passes"].get<int>();
        auto const offset = args.value("offset", 1.0);
        auto thick = std::vector<Polyline> {};
        for (auto const& p: out)
            append(thick, thicken(p, passes, offset));
        out = std::move(thick);
    }
    return out;
}

} // namespace

DispatchResult dispatch_tool_call(const ToolCall& call, const CanvasState& canvas)
{
    auto const* params = tool_parameters(call.name);
    if (!params)
        throw Error(ErrorCode::UnknownTool, fmt::format("unknown tool '{}'", call.name), { { "name", call.name } });
    validate_against_schema(call.args, *params, "args");

    auto exempt = std::optional<std::string> {};
    if (call.args.contains("attach_to"))
    {
        exempt = call.args["attach_to"].get<std::string>();
        if (!canvas.find(*exempt))
            throw Error(ErrorCode::ArgSchemaMismatch,
                        fmt::format("args.attach_to: no element '{}'", *exempt),
                        { { "path", "args.attach_to" } });
    }

    auto rng = RandomSource(call.seed.value_or(0));
    auto polylines = run_tool(call.name, call.args, canvas.constraints, rng);
    auto const label = call.args.value("label", std::string {});

    auto element = Element {};
    try
    {
        element = clip_element(canvas.constraints, Element::make({}, Author::agent, std::move(polylines), label));
    }
    catch (const Error& e)
    {
        if (e.code() != ErrorCode::EmptyElement)
            throw;
        violation(ViolationKind::edge_margin, 0.0, canvas.constraints.edge_margin,
                  "drawing lies entirely outside the margin");
    }

    try
    {
        auto next = add_element(canvas, element, AddPolicy::reject, exempt);
        auto const& added = next.elements.back();
        return { next, added.id, added.strokes };
    }
    catch (const Error& e)
    {
        if (e.code() != ErrorCode::RejectedByConstraint)
            throw;
        throw Error(ErrorCode::ConstraintViolation, e.what(), e.detail());
    }
}

} // namespace companion
