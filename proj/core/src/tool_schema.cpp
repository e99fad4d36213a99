// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/tool_schema.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace companion
{

namespace
{

using json = nlohmann::json;

json number(std::string description)
{
    return { { "type", "number" }, { "description", std::move(description) } };
}

json point(std::string description)
{
    return {
        { "type", "array" },
        { "description", std::move(description) },
        { "items", { { "type", "number" } } },
        { "minItems", 2 },
        { "maxItems", 2 },
    };
}

json point_list(std::string description, int min_items)
{
    return {
        { "type", "array" },
        { "description", std::move(description) },
        { "items", point("[x, y] in canvas pixels") },
        { "minItems", min_items },
    };
}

json object(json properties, json required)
{
    return { { "type", "object" }, { "properties", std::move(properties) }, { "required", std::move(required) } };
}

// Options shared by every tool.
void add_common(json& params, bool retrace)
{
    auto& props = params["properties"];
    props["label"] = { { "type", "string" }, { "description", "Short name of what is drawn, e.g. 'tree'." } };
    props["attach_to"] = {
        { "type", "string" },
        { "description",
          "Id of an existing element this drawing deliberately touches (e.g. hatching under a figure); the "
          "spacing rule is not enforced against it." },
    };
    if (retrace)
    {
        props["passes"] = {
            { "type", "integer" },
            { "description", "Draw each line this many times with a small offset to make it thicker." },
            { "minimum", 2 },
            { "maximum", 6 },
        };
        props["offset"] = {
            { "type", "number" },
            { "description", "Offset between retraced passes in pixels (default 1)." },
            { "minimum", 0 },
        };
    }
}

json declaration(std::string name, std::string description, json parameters, bool retrace)
{
    add_common(parameters, retrace);
    return { { "name", std::move(name) }, { "description", std::move(description) }, { "parameters", std::move(parameters) } };
}

json build_schema()
{
    auto decls = json::array();

    decls.push_back(declaration(
        "draw-segments",
        "Draw straight line segments.",
        object({ { "segments",
                   { { "type", "array" },
                     { "minItems", 1 },
                     { "items",
                       object({ { "start", point("Segment start [x, y].") }, { "end", point("Segment end [x, y].") } },
                              { "start", "end" }) } } } },
               { "segments" }),
        true));

    decls.push_back(declaration(
        "draw-circles",
        "Draw circles given by center and radius.",
        object({ { "circles",
                   { { "type", "array" },
                     { "minItems", 1 },
                     { "items",
                       object({ { "center", point("Circle center [x, y].") }, { "radius", number("Radius in pixels.") } },
                              { "center", "radius" }) } } } },
               { "circles" }),
        true));

    decls.push_back(declaration(
        "draw-splines",
        "Draw smooth curves passing through lists of keypoints. Use for organic shapes.",
        object({ { "splines",
                   { { "type", "array" },
                     { "minItems", 1 },
                     { "items", object({ { "keypoints", point_list("Points the curve passes through.", 2) } },
                                       { "keypoints" }) } } } },
               { "splines" }),
        true));

    decls.push_back(declaration("draw-path",
                                "Draw one smooth path through a list of keypoints.",
                                object({ { "keypoints", point_list("Points the path passes through.", 2) } },
                                       { "keypoints" }),
                                true));

    decls.push_back(declaration(
        "draw-text",
        "Write text with a single-stroke vector font.",
        object({ { "text", { { "type", "string" }, { "minLength", 1 }, { "description", "Text to write." } } },
                 { "origin", point("Left end of the baseline [x, y].") },
                 { "height", number("Capital letter height in pixels.") } },
               { "text", "origin", "height" }),
        false));

    decls.push_back(declaration(
        "draw-scribbles",
        "Fill a polygon with an organic scribble.",
        object({ { "polygon", point_list("Polygon vertices, closed implicitly.", 3) },
                 { "density", number("Scribble density, samples per 1000 square pixels, in (0, 100].") } },
               { "polygon", "density" }),
        false));

    decls.push_back(declaration(
        "draw-hatching",
        "Fill a polygon with parallel hatching lines, optionally cross-hatched.",
        object({ { "polygon", point_list("Polygon vertices, closed implicitly.", 3) },
                 { "density", number("Lines per 100 pixels, in (0, 100].") },
                 { "angle", number("Line direction in degrees (default 45).") },
                 { "cross", { { "type", "boolean" }, { "description", "Add a second family at +90 degrees." } } } },
               { "polygon", "density" }),
        false));

    decls.push_back(declaration(
        "draw-scribbly-splines",
        "Draw sketchy lines that oscillate around smooth curves through keypoints.",
        object({ { "splines",
                   { { "type", "array" },
                     { "minItems", 1 },
                     { "items", object({ { "keypoints", point_list("Points the central curve passes through.", 2) } },
                                       { "keypoints" }) } } },
                 { "amplitude", number("Oscillation amplitude in pixels (default 6).") },
                 { "wavelength", number("Oscillation wavelength in pixels (default 14).") } },
               { "splines" }),
        false));

    return { { "function_declarations", std::move(decls) } };
}

std::string_view json_type(const json& value)
{
    if (value.is_object())
        return "object";
    if (value.is_array())
        return "array";
    if (value.is_string())
        return "string";
    if (value.is_boolean())
        return "boolean";
    if (value.is_number())
        return "number";
    return "null";
}

[[noreturn]] void mismatch(const std::string& path, const std::string& what)
{
    throw Error(ErrorCode::ArgSchemaMismatch, fmt::format("{}: {}", path, what), json { { "path", path } });
}

} // namespace

const nlohmann::json& tool_schema()
{
    static const auto schema = build_schema();
    return schema;
}

const std::vector<std::string>& tool_names()
{
    static const auto names = [] {
        auto out = std::vector<std::string> {};
        for (auto const& d: tool_schema()["function_declarations"])
            out.push_back(d["name"].get<std::string>());
        return out;
    }();
    return names;
}

const nlohmann::json* tool_parameters(std::string_view name)
{
    for (auto const& d: tool_schema()["function_declarations"])
        if (d["name"].get<std::string_view>() == name)
            return &d["parameters"];
    return nullptr;
}

void validate_against_schema(const nlohmann::json& value, const nlohmann::json& schema, const std::string& path)
{
    auto const type = schema.value("type", std::string {});
    if (type == "object")
    {
        if (!value.is_object())
            mismatch(path, fmt::format("expected object, got {}", json_type(value)));
        auto const& props = schema.contains("properties") ? schema["properties"] : json::object();
        if (schema.contains("required"))
            for (auto const& key: schema["required"])
                if (!value.contains(key.get<std::string>()))
                    mismatch(path, fmt::format("missing required property '{}'", key.get<std::string>()));
        for (auto const& [key, item]: value.items())
        {
            if (!props.contains(key))
                mismatch(path, fmt::format("unexpected property '{}'", key));
            validate_against_schema(item, props[key], path + "." + key);
        }
    }
    else if (type == "array")
    {
        if (!value.is_array())
            mismatch(path, fmt::format("expected array, got {}", json_type(value)));
        if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>())
            mismatch(path, fmt::format("needs at least {} items", schema["minItems"].get<std::size_t>()));
        if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>())
            mismatch(path, fmt::format("allows at most {} items", schema["maxItems"].get<std::size_t>()));
        if (schema.contains("items"))
            for (std::size_t i = 0; i < value.size(); ++i)
                validate_against_schema(value[i], schema["items"], fmt::format("{}[{}]", path, i));
    }
    else if (type == "number" || type == "integer")
    {
        if (!value.is_number())
            mismatch(path, fmt::format("expected {}, got {}", type, json_type(value)));
        auto const v = value.get<double>();
        if (!std::isfinite(v))
            mismatch(path, "number is not finite");
        if (type == "integer" && v != std::floor(v))
            mismatch(path, "expected integer");
        if (schema.contains("minimum") && v < schema["minimum"].get<double>())
            mismatch(path, fmt::format("must be >= {}", schema["minimum"].get<double>()));
        if (schema.contains("maximum") && v > schema["maximum"].get<double>())
            mismatch(path, fmt::format("must be <= {}", schema["maximum"].get<double>()));
    }
    else if (type == "string")
    {
        if (!value.is_string())
            mismatch(path, fmt::format("expected string, got {}", json_type(value)));
        if (schema.contains("minLength") && value.get<std::string>().size() < schema["minLength"].get<std::size_t>())
            mismatch(path, "string too short");
    }
    else if (type == "boolean")
    {
        if (!value.is_boolean())
            mismatch(path, fmt::format("expected boolean, got {}", json_type(value)));
    }

    if (schema.contains("enum"))
    {
        auto const& options = schema["enum"];
        if (std::find(options.begin(), options.end(), value) == options.end())
            mismatch(path, "value not in enum");
    }
}

} // namespace companion
