// SPDX-License-Identifier: Apache-2.0
#include <companion/draw_tools.hpp>
#include <companion/error.hpp>
#include <companion/hershey.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace companion
{

Density::Density(double value): _value(value)
{
    if (!(value > 0.0 && value <= 100.0))
        throw Error(ErrorCode::InvalidDensity, fmt::format("density {} outside (0, 100]", value));
}

std::vector<Polyline> draw_segments(std::span<const Segment> segments)
{
    auto out = std::vector<Polyline> {};
    out.reserve(segments.size());
    for (auto const& s: segments)
    {
        if (!is_finite(s.start) || !is_finite(s.end) || s.start == s.end)
            throw Error(ErrorCode::DegenerateSegment, "segment has zero length");
        out.emplace_back(std::vector<Point> { s.start, s.end });
    }
    return out;
}

std::size_t circle_segment_count(double radius)
{
    auto const ratio = kChordTolerance / radius;
    if (ratio >= 2.0)
        return 16;
    auto const needed = std::ceil(std::numbers::pi / std::acos(1.0 - ratio));
    return std::max<std::size_t>(16, static_cast<std::size_t>(needed));
}

std::vector<Polyline> draw_circles(std::span<const Circle> circles)
{
    auto out = std::vector<Polyline> {};
    out.reserve(circles.size());
    for (auto const& c: circles)
    {
        if (!(c.radius > 0.0) || !std::isfinite(c.radius))
            throw Error(ErrorCode::NonPositiveRadius, fmt::format("radius {} must be positive", c.radius));
        if (!is_finite(c.center))
            throw Error(ErrorCode::InvalidArgument, "circle center is not finite");
        auto const n = circle_segment_count(c.radius);
        auto pts = std::vector<Point> {};
        pts.reserve(n + 1);
        for (std::size_t k = 0; k < n; ++k)
        {
            auto const a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            pts.push_back({ c.center.x + c.radius * std::cos(a), c.center.y + c.radius * std::sin(a) });
        }
        pts.push_back(pts.front());
        out.emplace_back(std::move(pts));
    }
    return out;
}

namespace
{

struct HermiteSpan
{
    Point p1;
    Point p2;
    Point m1; // tangents already scaled to the unit parameter interval
    Point m2;

    [[nodiscard]] Point at(double u) const
    {
        auto const u2 = u * u;
        auto const u3 = u2 * u;
        auto const h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        auto const h10 = u3 - 2.0 * u2 + u;
        auto const h01 = -2.0 * u3 + 3.0 * u2;
        auto const h11 = u3 - u2;
        return p1 * h00 + m1 * h10 + p2 * h01 + m2 * h11;
    }
};

// Terms whose knot gap vanishes (duplicated end control points) drop out.
Point ratio(Point v, double dt)
{
    return dt > 0.0 ? v * (1.0 / dt) : Point {};
}

HermiteSpan centripetal_span(Point p0, Point p1, Point p2, Point p3)
{
    auto const t01 = std::sqrt(distance(p0, p1));
    auto const t12 = std::sqrt(distance(p1, p2));
    auto const t23 = std::sqrt(distance(p2, p3));

    auto m1 = ratio(p1 - p0, t01) - ratio(p2 - p0, t01 + t12) + ratio(p2 - p1, t12);
    auto m2 = ratio(p2 - p1, t12) - ratio(p3 - p1, t12 + t23) + ratio(p3 - p2, t23);
    return { p1, p2, m1 * t12, m2 * t12 };
}

void flatten(const HermiteSpan& span, double ua, Point pa, double ub, Point pb, int depth, std::vector<Point>& out)
{
    auto const um = 0.5 * (ua + ub);
    auto const pm = span.at(um);
    auto const q1 = span.at(0.5 * (ua + um));
    auto const q3 = span.at(0.5 * (um + ub));
    auto const flat = distance_to_segment(pm, pa, pb) <= kChordTolerance
                      && distance_to_segment(q1, pa, pb) <= kChordTolerance
                      && distance_to_segment(q3, pa, pb) <= kChordTolerance;
    if (flat || depth >= 18)
    {
        out.push_back(pb);
        return;
    }
    flatten(span, ua, pa, um, pm, depth + 1, out);
    flatten(span, um, pm, ub, pb, depth + 1, out);
}

std::vector<Point> distinct_keypoints(std::span<const Point> keypoints)
{
    auto pts = std::vector<Point> {};
    pts.reserve(keypoints.size());
    for (auto const& p: keypoints)
    {
        if (!is_finite(p))
            throw Error(ErrorCode::InvalidArgument, "keypoint is not finite");
        if (pts.empty() || pts.back() != p)
            pts.push_back(p);
    }
    if (pts.size() < 2)
        throw Error(ErrorCode::TooFewPoints, "spline needs at least two distinct keypoints");
    return pts;
}

} // namespace

Polyline draw_splines(std::span<const Point> keypoints)
{
    auto const pts = distinct_keypoints(keypoints);
    auto out = std::vector<Point> { pts.front() };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    {
        auto const p0 = i == 0 ? pts[i] : pts[i - 1];
        auto const p3 = i + 2 < pts.size() ? pts[i + 2] : pts[i + 1];
        auto const span = centripetal_span(p0, pts[i], pts[i + 1], p3);
        flatten(span, 0.0, pts[i], 1.0, pts[i + 1], 0, out);
    }
    return Polyline(std::move(out));
}

Polyline draw_path(std::span<const Point> keypoints)
{
    return draw_splines(keypoints);
}

std::vector<Polyline> draw_text(std::string_view text, Point origin, double height)
{
    if (text.empty())
        throw Error(ErrorCode::EmptyText, "text is empty");
    if (!(height > 0.0) || !std::isfinite(height) || !is_finite(origin))
        throw Error(ErrorCode::InvalidArgument, "text height must be positive");

    auto const scale = height / static_cast<double>(hershey::kBaseLine - hershey::kCapLine);
    auto const line_advance = 1.6 * height;
    auto out = std::vector<Polyline> {};
    auto cursor = origin;

    for (auto c: text)
    {
        if (c == '\n')
        {
            cursor = { origin.x, cursor.y + line_advance };
            continue;
        }
        auto const* g = hershey::glyph(c);
        if (!g)
        {
            // placeholder box for glyphs outside the font
            auto const w = 0.5 * height;
            auto const x0 = cursor.x + 0.1 * height;
            auto const y0 = cursor.y;
            auto box = std::vector<Point> {
                { x0, y0 }, { x0 + w * 0.8, y0 }, { x0 + w * 0.8, y0 - w }, { x0, y0 - w }, { x0, y0 }
            };
            out.emplace_back(std::move(box));
            cursor.x += 0.6 * height;
            continue;
        }
        for (auto const& stroke: g->strokes)
        {
            auto pts = std::vector<Point> {};
            pts.reserve(stroke.size());
            for (auto const& gp: stroke)
                pts.push_back({ cursor.x + (gp.x - g->left) * scale, cursor.y + (gp.y - hershey::kBaseLine) * scale });
            if (auto line = Polyline::try_make(std::move(pts)))
                out.push_back(std::move(*line));
        }
        cursor.x += (g->right - g->left) * scale;
    }
    return out;
}

std::vector<Polyline> draw_scribbles(const Polygon& region, Density density, RandomSource& rng)
{
    auto const count = std::max<std::size_t>(3, static_cast<std::size_t>(std::llround(density.value() * region.area() / 1000.0)));
    auto const box = region.bbox();
    auto const max_attempts = 1000 * count;

    auto samples = std::vector<Point> {};
    samples.reserve(count);
    for (std::size_t attempt = 0; samples.size() < count; ++attempt)
    {
        if (attempt >= max_attempts)
            throw Error(ErrorCode::SamplingFailed,
                        fmt::format("rejection sampling found {} of {} points", samples.size(), count));
        auto const p = Point { rng.uniform(box.min_x, box.max_x), rng.uniform(box.min_y, box.max_y) };
        if (region.contains(p))
            samples.push_back(p);
    }

    // greedy nearest-neighbour tour from the first sample
    auto tour = std::vector<Point> { samples.front() };
    auto remaining = std::vector<Point>(samples.begin() + 1, samples.end());
    while (!remaining.empty())
    {
        auto const here = tour.back();
        auto best = remaining.begin();
        auto best_d = distance(here, *best);
        for (auto it = remaining.begin() + 1; it != remaining.end(); ++it)
        {
            auto const d = distance(here, *it);
            if (d < best_d)
            {
                best = it;
                best_d = d;
            }
        }
        tour.push_back(*best);
        remaining.erase(best);
    }

    return clip_to_polygon(draw_splines(tour), region);
}

namespace
{

void hatch_family(const Polygon& region, double spacing, double angle_deg, std::vector<Polyline>& out)
{
    auto const rad = angle_deg * std::numbers::pi / 180.0;
    auto const along = Point { std::cos(rad), std::sin(rad) };
    auto const across = Point { -along.y, along.x };

    auto const& verts = region.vertices();
    auto proj = std::vector<Point> {};
    proj.reserve(verts.size());
    auto v_min = std::numeric_limits<double>::infinity();
    auto v_max = -std::numeric_limits<double>::infinity();
    for (auto const& p: verts)
    {
        proj.push_back({ dot(p, along), dot(p, across) });
        v_min = std::min(v_min, proj.back().y);
        v_max = std::max(v_max, proj.back().y);
    }

    auto chord_index = std::size_t { 0 };
    auto crossings = std::vector<double> {};
    for (auto k = 0L;; ++k)
    {
        auto const v = v_min + spacing * (0.5 + static_cast<double>(k));
        if (v >= v_max)
            break;
        crossings.clear();
        for (std::size_t i = 0, n = proj.size(); i < n; ++i)
        {
            auto const a = proj[i];
            auto const b = proj[(i + 1) % n];
            if ((a.y > v) != (b.y > v))
                crossings.push_back(a.x + (v - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t i = 0; i + 1 < crossings.size(); i += 2)
        {
            auto const u0 = crossings[i];
            auto const u1 = crossings[i + 1];
            if (u1 - u0 < 1.0)
                continue;
            auto a = along * u0 + across * v;
            auto b = along * u1 + across * v;
            if (chord_index++ % 2 == 1)
                std::swap(a, b);
            out.emplace_back(std::vector<Point> { a, b });
        }
    }
}

} // namespace

std::vector<Polyline> draw_hatching(const Polygon& region, Density density, double angle_deg, bool cross)
{
    if (!std::isfinite(angle_deg))
        throw Error(ErrorCode::InvalidArgument, "hatching angle is not finite");
    auto const spacing = 100.0 / density.value();
    auto out = std::vector<Polyline> {};
    hatch_family(region, spacing, angle_deg, out);
    if (cross)
        hatch_family(region, spacing, angle_deg + 90.0, out);
    return out;
}

Polyline draw_scribbly_splines(std::span<const Point> keypoints, ScribbleStyle style, RandomSource& rng)
{
    if (!(style.amplitude >= 0.0) || !(style.wavelength > 0.0) || !std::isfinite(style.amplitude)
        || !std::isfinite(style.wavelength))
        throw Error(ErrorCode::InvalidArgument, "amplitude must be >= 0 and wavelength > 0");

    auto central = draw_splines(keypoints);
    if (style.amplitude == 0.0)
        return central;

    auto const& c = central.points();
    auto cumulative = std::vector<double>(c.size(), 0.0);
    for (std::size_t i = 1; i < c.size(); ++i)
        cumulative[i] = cumulative[i - 1] + distance(c[i - 1], c[i]);
    auto const total = cumulative.back();

    auto const half_wave = 0.5 * style.wavelength;
    auto const step = style.wavelength / 16.0;
    auto jitter = std::vector<double> {};
    auto const jitter_at = [&](double s) {
        auto const index = static_cast<std::size_t>(s / half_wave);
        while (jitter.size() <= index)
            jitter.push_back(rng.uniform(0.8, 1.2));
        return jitter[index];
    };

    auto out = std::vector<Point> {};
    std::size_t seg = 1;
    auto const samples = static_cast<std::size_t>(std::ceil(total / step));
    for (std::size_t i = 0; i <= samples; ++i)
    {
        auto const s = std::min(total, static_cast<double>(i) * step);
        while (seg + 1 < c.size() && cumulative[seg] < s)
            ++seg;
        auto const a = c[seg - 1];
        auto const b = c[seg];
        auto const len = cumulative[seg] - cumulative[seg - 1];
        auto const t = len > 0.0 ? (s - cumulative[seg - 1]) / len : 0.0;
        auto const on_curve = a + (b - a) * t;
        auto const normal = Point { -(b.y - a.y) / len, (b.x - a.x) / len };
        auto const offset =
            style.amplitude * jitter_at(s) * std::sin(2.0 * std::numbers::pi * s / style.wavelength);
        out.push_back(on_curve + normal * offset);
    }
    return Polyline(std::move(out));
}

std::vector<Polyline> thicken(const Polyline& stroke, int passes, double offset)
{
    if (passes < 2 || passes > 6)
        throw Error(ErrorCode::InvalidPassCount, fmt::format("pass count {} outside [2, 6]", passes));
    if (!(offset > 0.0) || !std::isfinite(offset))
        throw Error(ErrorCode::InvalidArgument, "thickening offset must be positive");

    auto const& pts = stroke.points();
    auto const n = pts.size();
    auto segment_normal = [&](std::size_t i) {
        auto const d = pts[i + 1] - pts[i];
        auto const len = norm(d);
        return Point { -d.y / len, d.x / len };
    };

    auto normals = std::vector<Point>(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i == 0)
            normals[i] = segment_normal(0);
        else if (i + 1 == n)
            normals[i] = segment_normal(n - 2);
        else
        {
            auto const sum = segment_normal(i - 1) + segment_normal(i);
            auto const len = norm(sum);
            normals[i] = len > 1e-9 ? sum * (1.0 / len) : segment_normal(i - 1);
        }
    }

    auto out = std::vector<Polyline> {};
    out.reserve(static_cast<std::size_t>(passes));
    for (auto k = 0; k < passes; ++k)
    {
        auto const shift = offset * (static_cast<double>(k) - 0.5 * static_cast<double>(passes - 1));
        if (shift == 0.0)
        {
            out.push_back(stroke);
            continue;
        }
        auto moved = std::vector<Point> {};
        moved.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            moved.push_back(pts[i] + normals[i] * shift);
        out.emplace_back(std::move(moved));
    }
    return out;
}

} // namespace companion
