// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

namespace companion
{

/// Canvas coordinates in pixels, origin top-left, y pointing down.
struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;

    Point operator+(Point o) const { return { x + o.x, y + o.y }; }
    Point operator-(Point o) const { return { x - o.x, y - o.y }; }
    Point operator*(double s) const { return { x * s, y * s }; }
};

double dot(Point a, Point b);
double cross(Point a, Point b);
double norm(Point a);
double distance(Point a, Point b);
bool is_finite(Point p);

/// Distance from `p` to the closed segment [a, b].
double distance_to_segment(Point p, Point a, Point b);

struct BBox
{
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    friend bool operator==(const BBox&, const BBox&) = default;

    [[nodiscard]] double width() const { return max_x - min_x; }
    [[nodiscard]] double height() const { return max_y - min_y; }
    [[nodiscard]] bool contains(Point p) const;
    [[nodiscard]] bool contains(const BBox& other) const;
    void expand(Point p);
    void expand(const BBox& other);

    static BBox around(Point p) { return { p.x, p.y, p.x, p.y }; }
};

/// Euclidean gap between two boxes; 0 when they touch or overlap.
double bbox_distance(const BBox& a, const BBox& b);

/// Pen-down stroke. Holds at least two points, no consecutive duplicates and
/// a positive length; construction enforces this.
class Polyline
{
  public:
    /// Throws DegenerateStroke when the cleaned point list has fewer than two
    /// points or contains non-finite coordinates.
    explicit Polyline(std::vector<Point> points);

    /// Same cleanup as the constructor, but yields nullopt instead of throwing
    /// for degenerate input.
    static std::optional<Polyline> try_make(std::vector<Point> points);

    [[nodiscard]] const std::vector<Point>& points() const noexcept { return _points; }
    [[nodiscard]] std::size_t size() const noexcept { return _points.size(); }
    [[nodiscard]] Point front() const { return _points.front(); }
    [[nodiscard]] Point back() const { return _points.back(); }
    [[nodiscard]] double length() const;
    [[nodiscard]] BBox bbox() const;
    [[nodiscard]] Polyline reversed() const;

    friend bool operator==(const Polyline&, const Polyline&) = default;

  private:
    std::vector<Point> _points;
};

double total_length(std::span<const Polyline> strokes);

/// Closed polygon under the even-odd rule. At least three distinct vertices
/// and non-zero area.
class Polygon
{
  public:
    explicit Polygon(std::vector<Point> vertices);

    [[nodiscard]] const std::vector<Point>& vertices() const noexcept { return _vertices; }
    /// Absolute shoelace area.
    [[nodiscard]] double area() const;
    [[nodiscard]] BBox bbox() const;
    /// Even-odd point test. Points exactly on the boundary may go either way.
    [[nodiscard]] bool contains(Point p) const;
    /// Distance from `p` to the nearest boundary edge.
    [[nodiscard]] double boundary_distance(Point p) const;

  private:
    std::vector<Point> _vertices;
};

/// Clips a stroke to an axis-aligned rectangle (boundary inclusive), segment
/// by segment. A stroke that leaves and re-enters comes back as several.
std::vector<Polyline> clip_to_rect(const Polyline& stroke, const BBox& rect);

/// Keeps the parts of `stroke` inside `region`; crossing points are computed
/// exactly on the boundary edges.
std::vector<Polyline> clip_to_polygon(const Polyline& stroke, const Polygon& region);

} // namespace companion
