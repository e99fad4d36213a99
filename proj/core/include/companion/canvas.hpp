// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/geometry.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace companion
{

/// Page size and the placement rules the agent must respect.
struct ConstraintSet
{
    double width = 1200.0;
    double height = 900.0;
    double edge_margin = 30.0;
    double element_buffer = 40.0;
    double max_element_height = 300.0;
    double min_line_len_px = 0.0;
    double min_circle_diam_px = 0.0;
    double min_text_height_px = 0.0;

    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

    /// Rectangle agent strokes must stay inside.
    [[nodiscard]] BBox margin_rect() const;
    [[nodiscard]] BBox page_rect() const;

    /// Throws InvalidArgument when a dimension is non-positive or the margins
    /// leave no drawable area.
    void check() const;
};

enum class Author
{
    agent,
    human,
};

std::string_view to_string(Author author);
Author author_from_string(std::string_view text);

struct Element
{
    std::string id;
    Author author = Author::agent;
    std::vector<Polyline> strokes;
    std::string label;
    BBox bbox;

    friend bool operator==(const Element&, const Element&) = default;

    /// Builds an element and caches its tight bounding box. An empty stroke
    /// list raises EmptyElement.
    static Element make(std::string id, Author author, std::vector<Polyline> strokes, std::string label = {});
};

/// Min bbox-to-bbox distance, in px.
double min_element_distance(const Element& a, const Element& b);

enum class ViolationKind
{
    edge_margin,
    element_buffer,
    height_cap,
    min_line_length,
    min_circle_diameter,
    min_text_height,
};

std::string_view to_string(ViolationKind kind);

struct Violation
{
    ViolationKind kind;
    std::string other_element; ///< set for element_buffer
    double measured = 0.0;
    double limit = 0.0;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport
{
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] bool has(ViolationKind kind) const;
    [[nodiscard]] nlohmann::json to_json() const;

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Immutable drawing state. Every mutation yields a new value whose revision
/// is exactly one higher.
struct CanvasState
{
    ConstraintSet constraints;
    std::vector<Element> elements;
    std::uint64_t revision = 0;

    friend bool operator==(const CanvasState&, const CanvasState&) = default;

    [[nodiscard]] const Element* find(std::string_view id) const;
    /// Next free "eN" identifier.
    [[nodiscard]] std::string next_element_id() const;
};

/// Checks a candidate against the page rules. Agent candidates are checked
/// for edge margin, element buffer and height cap; human candidates only
/// have to stay on the page. `exempt` names an existing element the buffer
/// is not enforced against.
ValidationReport validate_placement(
    const CanvasState& canvas, const Element& candidate, const std::optional<std::string>& exempt = std::nullopt);

enum class AddPolicy
{
    reject,
    clip_then_accept,
};

/// Clips `element` to the rectangle its author is bound to: the margin
/// rectangle for the agent, the page for a human. Throws EmptyElement when
/// nothing survives.
Element clip_element(const ConstraintSet& constraints, const Element& element);

/// Adds an element. Under `reject` any placement violation raises
/// RejectedByConstraint; under `clip_then_accept` strokes are clipped and the
/// element accepted. An empty id is replaced by `next_element_id()`.
CanvasState add_element(
    const CanvasState& canvas,
    Element element,
    AddPolicy policy,
    const std::optional<std::string>& exempt = std::nullopt);

// Persistence: {constraints, elements[{id, author, label, strokes}], revision}.
nlohmann::json to_json(const ConstraintSet& constraints);
ConstraintSet constraints_from_json(const nlohmann::json& doc);
nlohmann::json stroke_to_json(const Polyline& stroke);
Polyline stroke_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CanvasState& canvas);
CanvasState canvas_from_json(const nlohmann::json& doc);

} // namespace companion
