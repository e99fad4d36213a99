// SPDX-License-Identifier: Apache-2.0
#include <companion/canvas.hpp>
#include <companion/error.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace companion
{

BBox ConstraintSet::margin_rect() const
{
    return { edge_margin, edge_margin, width - edge_margin, height - edge_margin };
}

BBox ConstraintSet::page_rect() const
{
    return { 0.0, 0.0, width, height };
}

void ConstraintSet::check() const
{
    if (!(width > 0.0 && height > 0.0 && edge_margin >= 0.0 && element_buffer >= 0.0 && max_element_height > 0.0))
        throw Error(ErrorCode::InvalidArgument, "constraint values must be positive");
    if (!(2.0 * edge_margin < width && 2.0 * edge_margin < height))
        throw Error(ErrorCode::InvalidArgument, "edge margin leaves no drawable area");
    if (min_line_len_px < 0.0 || min_circle_diam_px < 0.0 || min_text_height_px < 0.0)
        throw Error(ErrorCode::InvalidArgument, "minimum sizes must not be negative");
}

std::string_view to_string(Author author)
{
    return author == Author::agent ? "agent" : "human";
}

Author author_from_string(std::string_view text)
{
    if (text == "agent")
        return Author::agent;
    if (text == "human")
        return Author::human;
    throw Error(ErrorCode::InvalidDocument, fmt::format("unknown author '{}'", text));
}

Element Element::make(std::string id, Author author, std::vector<Polyline> strokes, std::string label)
{
    if (strokes.empty())
        throw Error(ErrorCode::EmptyElement, "element has no strokes");
    auto box = strokes.front().bbox();
    for (auto const& s: strokes)
        box.expand(s.bbox());
    return Element {
        .id = std::move(id),
        .author = author,
        .strokes = std::move(strokes),
        .label = std::move(label),
        .bbox = box,
    };
}

double min_element_distance(const Element& a, const Element& b)
{
    if (a.strokes.empty() || b.strokes.empty())
        throw Error(ErrorCode::EmptyElement, "distance needs two non-empty elements");
    return bbox_distance(a.bbox, b.bbox);
}

std::string_view to_string(ViolationKind kind)
{
    switch (kind)
    {
        case ViolationKind::edge_margin: return "edge_margin";
        case ViolationKind::element_buffer: return "element_buffer";
        case ViolationKind::height_cap: return "height_cap";
        case ViolationKind::min_line_length: return "min_line_length";
        case ViolationKind::min_circle_diameter: return "min_circle_diameter";
        case ViolationKind::min_text_height: return "min_text_height";
    }
    return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const
{
    return std::any_of(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; });
}

nlohmann::json ValidationReport::to_json() const
{
    auto list = nlohmann::json::array();
    for (auto const& v: violations)
    {
        auto entry = nlohmann::json { { "kind", to_string(v.kind) }, { "measured", v.measured }, { "limit", v.limit } };
        if (!v.other_element.empty())
            entry["other"] = v.other_element;
        list.push_back(std::move(entry));
    }
    return { { "ok", ok() }, { "violations", std::move(list) } };
}

const Element* CanvasState::find(std::string_view id) const
{
    auto it = std::find_if(elements.begin(), elements.end(), [id](const Element& e) { return e.id == id; });
    return it == elements.end() ? nullptr : &*it;
}

std::string CanvasState::next_element_id() const
{
    for (auto n = elements.size() + 1;; ++n)
    {
        auto id = fmt::format("e{}", n);
        if (!find(id))
            return id;
    }
}

ValidationReport validate_placement(
    const CanvasState& canvas, const Element& candidate, const std::optional<std::string>& exempt)
{
    auto const& c = canvas.constraints;
    auto report = ValidationReport {};

    if (candidate.author == Author::human)
    {
        if (!c.page_rect().contains(candidate.bbox))
            report.violations.push_back({ ViolationKind::edge_margin, {}, 0.0, 0.0 });
        return report;
    }

    auto const rect = c.margin_rect();
    if (!rect.contains(candidate.bbox))
    {
        auto const outside = std::max({ rect.min_x - candidate.bbox.min_x,
                                        rect.min_y - candidate.bbox.min_y,
                                        candidate.bbox.max_x - rect.max_x,
                                        candidate.bbox.max_y - rect.max_y });
        report.violations.push_back({ ViolationKind::edge_margin, {}, outside, c.edge_margin });
    }

    for (auto const& other: canvas.elements)
    {
        if (exempt && other.id == *exempt)
            continue;
        auto const gap = min_element_distance(candidate, other);
        if (gap < c.element_buffer)
            report.violations.push_back({ ViolationKind::element_buffer, other.id, gap, c.element_buffer });
    }

    if (candidate.bbox.height() > c.max_element_height)
        report.violations.push_back(
            { ViolationKind::height_cap, {}, candidate.bbox.height(), c.max_element_height });

    return report;
}

Element clip_element(const ConstraintSet& constraints, const Element& element)
{
    auto const rect = element.author == Author::agent ? constraints.margin_rect() : constraints.page_rect();
    auto clipped = std::vector<Polyline> {};
    for (auto const& s: element.strokes)
    {
        auto const bbox = s.bbox();
        if (rect.contains(bbox))
        {
            clipped.push_back(s);
            continue;
        }
        for (auto& piece: clip_to_rect(s, rect))
            clipped.push_back(std::move(piece));
    }
    if (clipped.empty())
        throw Error(ErrorCode::EmptyElement, "element lies entirely outside the drawable area");
    return Element::make(element.id, element.author, std::move(clipped), element.label);
}

CanvasState add_element(
    const CanvasState& canvas, Element element, AddPolicy policy, const std::optional<std::string>& exempt)
{
    if (element.strokes.empty())
        throw Error(ErrorCode::EmptyElement, "element has no strokes");
    if (element.id.empty())
        element.id = canvas.next_element_id();
    else if (canvas.find(element.id))
        throw Error(ErrorCode::DuplicateElementId, fmt::format("element id '{}' already in use", element.id));

    if (policy == AddPolicy::reject)
    {
        element = Element::make(element.id, element.author, std::move(element.strokes), element.label);
        auto report = validate_placement(canvas, element, exempt);
        if (!report.ok())
            throw Error(ErrorCode::RejectedByConstraint, "placement violates constraints", report.to_json());
    }
    else
    {
        element = clip_element(canvas.constraints, element);
    }

    auto next = canvas;
    next.elements.push_back(std::move(element));
    next.revision = canvas.revision + 1;
    return next;
}

nlohmann::json to_json(const ConstraintSet& c)
{
    return {
        { "width", c.width },
        { "height", c.height },
        { "edge_margin", c.edge_margin },
        { "element_buffer", c.element_buffer },
        { "max_element_height", c.max_element_height },
        { "min_line_len_px", c.min_line_len_px },
        { "min_circle_diam_px", c.min_circle_diam_px },
        { "min_text_height_px", c.min_text_height_px },
    };
}

ConstraintSet constraints_from_json(const nlohmann::json& doc)
{
    try
    {
        auto c = ConstraintSet {};
        c.width = doc.at("width").get<double>();
        c.height = doc.at("height").get<double>();
        c.edge_margin = doc.at("edge_margin").get<double>();
        c.element_buffer = doc.at("element_buffer").get<double>();
        c.max_element_height = doc.at("max_element_height").get<double>();
        c.min_line_len_px = doc.value("min_line_len_px", 0.0);
        c.min_circle_diam_px = doc.value("min_circle_diam_px", 0.0);
        c.min_text_height_px = doc.value("min_text_height_px", 0.0);
        c.check();
        return c;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::InvalidDocument, fmt::format("bad constraints: {}", e.what()));
    }
}

nlohmann::json stroke_to_json(const Polyline& stroke)
{
    auto pts = nlohmann::json::array();
    for (auto const& p: stroke.points())
        pts.push_back({ p.x, p.y });
    return pts;
}

Polyline stroke_from_json(const nlohmann::json& doc)
{
    if (!doc.is_array())
        throw Error(ErrorCode::InvalidDocument, "stroke must be an array of [x, y] pairs");
    auto pts = std::vector<Point> {};
    pts.reserve(doc.size());
    for (auto const& p: doc)
    {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw Error(ErrorCode::InvalidDocument, "stroke point must be [x, y]");
        pts.push_back({ p[0].get<double>(), p[1].get<double>() });
    }
    return Polyline(std::move(pts));
}

nlohmann::json to_json(const CanvasState& canvas)
{
    auto elements = nlohmann::json::array();
    for (auto const& e: canvas.elements)
    {
        auto strokes = nlohmann::json::array();
        for (auto const& s: e.strokes)
            strokes.push_back(stroke_to_json(s));
        elements.push_back({
            { "id", e.id },
            { "author", to_string(e.author) },
            { "label", e.label },
            { "strokes", std::move(strokes) },
        });
    }
    return {
        { "constraints", to_json(canvas.constraints) },
        { "elements", std::move(elements) },
        { "revision", canvas.revision },
    };
}

CanvasState canvas_from_json(const nlohmann::json& doc)
{
    try
    {
        auto canvas = CanvasState {};
        canvas.constraints = constraints_from_json(doc.at("constraints"));
        for (auto const& e: doc.at("elements"))
        {
            auto strokes = std::vector<Polyline> {};
            for (auto const& s: e.at("strokes"))
                strokes.push_back(stroke_from_json(s));
            auto id = e.at("id").get<std::string>();
            if (canvas.find(id))
                throw Error(ErrorCode::DuplicateElementId, fmt::format("element id '{}' repeated", id));
            canvas.elements.push_back(Element::make(std::move(id),
                                                    author_from_string(e.at("author").get<std::string>()),
                                                    std::move(strokes),
                                                    e.value("label", std::string {})));
        }
        canvas.revision = doc.at("revision").get<std::uint64_t>();
        return canvas;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::InvalidDocument, fmt::format("bad canvas document: {}", e.what()));
    }
}

} // namespace companion
