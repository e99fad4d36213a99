// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace companion
{

double dot(Point a, Point b)
{
    return a.x * b.x + a.y * b.y;
}

double cross(Point a, Point b)
{
    return a.x * b.y - a.y * b.x;
}

double norm(Point a)
{
    return std::hypot(a.x, a.y);
}

double distance(Point a, Point b)
{
    return norm(a - b);
}

bool is_finite(Point p)
{
    return std::isfinite(p.x) && std::isfinite(p.y);
}

double distance_to_segment(Point p, Point a, Point b)
{
    auto const ab = b - a;
    auto const len2 = dot(ab, ab);
    if (len2 == 0.0)
        return distance(p, a);
    auto const t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

bool BBox::contains(Point p) const
{
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
}

bool BBox::contains(const BBox& other) const
{
    return other.min_x >= min_x && other.max_x <= max_x && other.min_y >= min_y && other.max_y <= max_y;
}

void BBox::expand(Point p)
{
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
}

void BBox::expand(const BBox& other)
{
    expand(Point { other.min_x, other.min_y });
    expand(Point { other.max_x, other.max_y });
}

double bbox_distance(const BBox& a, const BBox& b)
{
    auto const dx = std::max({ 0.0, b.min_x - a.max_x, a.min_x - b.max_x });
    auto const dy = std::max({ 0.0, b.min_y - a.max_y, a.min_y - b.max_y });
    return std::hypot(dx, dy);
}

namespace
{

std::vector<Point> collapse_duplicates(std::vector<Point> points)
{
    auto const last = std::unique(points.begin(), points.end());
    points.erase(last, points.end());
    return points;
}

bool all_finite(const std::vector<Point>& points)
{
    return std::all_of(points.begin(), points.end(), [](Point p) { return is_finite(p); });
}

} // namespace

Polyline::Polyline(std::vector<Point> points)
{
    if (!all_finite(points))
        throw Error(ErrorCode::DegenerateStroke, "stroke contains a non-finite coordinate");
    _points = collapse_duplicates(std::move(points));
    if (_points.size() < 2)
        throw Error(ErrorCode::DegenerateStroke, "stroke needs at least two distinct points");
}

std::optional<Polyline> Polyline::try_make(std::vector<Point> points)
{
    if (!all_finite(points))
        return std::nullopt;
    points = collapse_duplicates(std::move(points));
    if (points.size() < 2)
        return std::nullopt;
    return Polyline(std::move(points));
}

double Polyline::length() const
{
    auto total = 0.0;
    for (std::size_t i = 1; i < _points.size(); ++i)
        total += distance(_points[i - 1], _points[i]);
    return total;
}

BBox Polyline::bbox() const
{
    auto box = BBox::around(_points.front());
    for (auto const& p: _points)
        box.expand(p);
    return box;
}

Polyline Polyline::reversed() const
{
    auto copy = _points;
    std::reverse(copy.begin(), copy.end());
    return Polyline(std::move(copy));
}

double total_length(std::span<const Polyline> strokes)
{
    auto total = 0.0;
    for (auto const& s: strokes)
        total += s.length();
    return total;
}

namespace
{

double signed_area(const std::vector<Point>& v)
{
    auto sum = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i)
        sum += cross(v[i], v[(i + 1) % n]);
    return 0.5 * sum;
}

} // namespace

Polygon::Polygon(std::vector<Point> vertices)
{
    if (!all_finite(vertices))
        throw Error(ErrorCode::InvalidPolygon, "polygon contains a non-finite coordinate");
    vertices = collapse_duplicates(std::move(vertices));
    while (vertices.size() > 1 && vertices.front() == vertices.back())
        vertices.pop_back();
    if (vertices.size() < 3)
        throw Error(ErrorCode::InvalidPolygon, "polygon needs at least three distinct vertices");
    _vertices = std::move(vertices);
    if (!(area() > 1e-9))
        throw Error(ErrorCode::InvalidPolygon, "polygon has zero area");
}

double Polygon::area() const
{
    return std::abs(signed_area(_vertices));
}

BBox Polygon::bbox() const
{
    auto box = BBox::around(_vertices.front());
    for (auto const& p: _vertices)
        box.expand(p);
    return box;
}

bool Polygon::contains(Point p) const
{
    auto inside = false;
    for (std::size_t i = 0, n = _vertices.size(), j = n - 1; i < n; j = i++)
    {
        auto const& a = _vertices[i];
        auto const& b = _vertices[j];
        if ((a.y > p.y) != (b.y > p.y))
        {
            auto const x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x)
                inside = !inside;
        }
    }
    return inside;
}

double Polygon::boundary_distance(Point p) const
{
    auto best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = _vertices.size(); i < n; ++i)
        best = std::min(best, distance_to_segment(p, _vertices[i], _vertices[(i + 1) % n]));
    return best;
}

namespace
{

// Liang-Barsky; returns the parameter interval of [a, b] inside `rect`.
bool clip_segment(Point a, Point b, const BBox& rect, double& t0, double& t1)
{
    t0 = 0.0;
    t1 = 1.0;
    auto const d = b - a;
    auto const test = [&](double p, double q) {
        if (p == 0.0)
            return q >= 0.0;
        auto const r = q / p;
        if (p < 0.0)
        {
            if (r > t1)
                return false;
            t0 = std::max(t0, r);
        }
        else
        {
            if (r < t0)
                return false;
            t1 = std::min(t1, r);
        }
        return true;
    };
    return test(-d.x, a.x - rect.min_x) && test(d.x, rect.max_x - a.x) && test(-d.y, a.y - rect.min_y)
           && test(d.y, rect.max_y - a.y);
}

Point clamp_to(const BBox& rect, Point p)
{
    return { std::clamp(p.x, rect.min_x, rect.max_x), std::clamp(p.y, rect.min_y, rect.max_y) };
}

void flush(std::vector<Point>& run, std::vector<Polyline>& out)
{
    if (auto line = Polyline::try_make(std::move(run)))
        out.push_back(std::move(*line));
    run.clear();
}

} // namespace

std::vector<Polyline> clip_to_rect(const Polyline& stroke, const BBox& rect)
{
    auto out = std::vector<Polyline> {};
    auto run = std::vector<Point> {};
    auto const& pts = stroke.points();
    for (std::size_t i = 1; i < pts.size(); ++i)
    {
        auto t0 = 0.0;
        auto t1 = 0.0;
        if (!clip_segment(pts[i - 1], pts[i], rect, t0, t1) || t0 > t1)
        {
            flush(run, out);
            continue;
        }
        auto const d = pts[i] - pts[i - 1];
        // Interior points are kept verbatim; computed crossings are clamped so
        // rounding can never leave them a hair outside the rectangle.
        auto const a = t0 == 0.0 ? pts[i - 1] : clamp_to(rect, pts[i - 1] + d * t0);
        auto const b = t1 == 1.0 ? pts[i] : clamp_to(rect, pts[i - 1] + d * t1);
        if (!run.empty() && run.back() != a)
            flush(run, out);
        if (run.empty())
            run.push_back(a);
        run.push_back(b);
        if (t1 < 1.0)
            flush(run, out);
    }
    flush(run, out);
    return out;
}

std::vector<Polyline> clip_to_polygon(const Polyline& stroke, const Polygon& region)
{
    auto const& verts = region.vertices();
    auto const n = verts.size();
    auto out = std::vector<Polyline> {};
    auto run = std::vector<Point> {};
    auto const& pts = stroke.points();

    for (std::size_t i = 1; i < pts.size(); ++i)
    {
        auto const a = pts[i - 1];
        auto const b = pts[i];
        auto const d = b - a;

        auto cuts = std::vector<double> { 0.0, 1.0 };
        for (std::size_t k = 0; k < n; ++k)
        {
            auto const p = verts[k];
            auto const e = verts[(k + 1) % n] - p;
            auto const denom = cross(d, e);
            if (denom == 0.0)
                continue;
            auto const t = cross(p - a, e) / denom;
            auto const u = cross(p - a, d) / denom;
            if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0)
                cuts.push_back(t);
        }
        std::sort(cuts.begin(), cuts.end());

        for (std::size_t k = 1; k < cuts.size(); ++k)
        {
            auto const ta = cuts[k - 1];
            auto const tb = cuts[k];
            if (tb - ta <= 0.0)
                continue;
            auto const mid = a + d * (0.5 * (ta + tb));
            auto const pa = ta == 0.0 ? a : a + d * ta;
            auto const pb = tb == 1.0 ? b : a + d * tb;
            if (!region.contains(mid))
            {
                flush(run, out);
                continue;
            }
            if (!run.empty() && run.back() != pa)
                flush(run, out);
            if (run.empty())
                run.push_back(pa);
            run.push_back(pb);
        }
    }
    flush(run, out);
    return out;
}

} // namespace companion
