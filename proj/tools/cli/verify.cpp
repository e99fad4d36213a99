// SPDX-License-Identifier: Apache-2.0
#include "verify.hpp"

#include <companion/error.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace companion::cli
{

CircleFit fit_circle(std::span<const Point> points)
{
    if (points.size() < 3)
        throw Error(ErrorCode::InvalidArgument, "circle fit needs at least three points");
    auto mean = Point {};
    for (auto p: points)
        mean = mean + p * (1.0 / static_cast<double>(points.size()));

    // Normal equations of sum (x^2 + y^2 + D x + E y + F)^2 on centred data.
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
    auto const n = static_cast<double>(points.size());
    for (auto p: points)
    {
        auto const x = p.x - mean.x;
        auto const y = p.y - mean.y;
        auto const z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sx += x;
        sy += y;
        sxz += x * z;
        syz += y * z;
        sz += z;
    }
    double const a[3][3] = { { sxx, sxy, sx }, { sxy, syy, sy }, { sx, sy, n } };
    double const b[3] = { -sxz, -syz, -sz };
    auto const det = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    auto const d = det(a);
    auto const scale = std::max({ sxx, syy, 1.0 });
    if (std::abs(d) <= 1e-12 * scale * scale * n)
        throw Error(ErrorCode::InvalidArgument, "points are collinear; no circle fits");

    double sol[3];
    for (int k = 0; k < 3; ++k)
    {
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                m[r][c] = c == k ? b[r] : a[r][c];
        sol[k] = det(m) / d;
    }
    auto fit = CircleFit {};
    fit.center = { mean.x - sol[0] / 2.0, mean.y - sol[1] / 2.0 };
    auto const r2 = (sol[0] * sol[0] + sol[1] * sol[1]) / 4.0 - sol[2];
    fit.radius = std::sqrt(std::max(0.0, r2));
    auto sum = 0.0;
    for (auto p: points)
    {
        auto const e = distance(p, fit.center) - fit.radius;
        sum += e * e;
    }
    fit.rms_residual = std::sqrt(sum / n);
    return fit;
}

LineFit fit_line(std::span<const Point> points)
{
    if (points.empty())
        throw Error(ErrorCode::InvalidArgument, "line fit needs points");
    auto fit = LineFit {};
    for (auto p: points)
        fit.centroid = fit.centroid + p * (1.0 / static_cast<double>(points.size()));
    double sxx = 0, sxy = 0, syy = 0;
    for (auto p: points)
    {
        auto const d = p - fit.centroid;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    // Principal axis of the 2x2 scatter matrix.
    auto const theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    fit.direction = { std::cos(theta), std::sin(theta) };
    for (auto p: points)
        fit.max_distance = std::max(fit.max_distance, std::abs(cross(fit.direction, p - fit.centroid)));
    return fit;
}

namespace
{

std::vector<Point> element_points(const Element& e)
{
    auto out = std::vector<Point> {};
    for (auto const& s: e.strokes)
        out.insert(out.end(), s.points().begin(), s.points().end());
    return out;
}

std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    auto hull = std::vector<Point>(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i)
    {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0)
            --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

// Counter-clockwise hull (in x-right, y-up orientation of the cross product).
bool hull_contains(const std::vector<Point>& hull, Point p, double tol)
{
    if (hull.size() < 3)
        return false;
    for (std::size_t i = 0; i < hull.size(); ++i)
    {
        auto const a = hull[i];
        auto const b = hull[(i + 1) % hull.size()];
        if (cross(b - a, p - a) < -tol * norm(b - a))
            return false;
    }
    return true;
}

// "e1..e3" expands to e1 e2 e3.
std::vector<std::string> expand_ids(const std::vector<std::string>& tokens)
{
    auto out = std::vector<std::string> {};
    for (auto const& t: tokens)
    {
        auto const dots = t.find("..");
        if (dots == std::string::npos)
        {
            out.push_back(t);
            continue;
        }
        auto const lo = t.substr(0, dots);
        auto const hi = t.substr(dots + 2);
        auto const digits = [](const std::string& s) { return s.find_first_of("0123456789"); };
        auto const pl = digits(lo);
        auto const ph = digits(hi);
        if (pl == std::string::npos || ph == std::string::npos || lo.substr(0, pl) != hi.substr(0, ph))
            throw Error(ErrorCode::InvalidArgument, fmt::format("bad element range '{}'", t));
        auto const a = std::stoi(lo.substr(pl));
        auto const b = std::stoi(hi.substr(ph));
        for (int i = a; i <= b; ++i)
            out.push_back(fmt::format("{}{}", lo.substr(0, pl), i));
    }
    return out;
}

struct Parsed
{
    std::string keyword;
    std::vector<std::string> ids;
    std::optional<double> tol;
};

Parsed parse_line(const std::string& line)
{
    auto in = std::istringstream(line);
    auto parsed = Parsed {};
    in >> parsed.keyword;
    auto raw = std::vector<std::string> {};
    for (std::string token; in >> token;)
    {
        if (token.rfind("tol=", 0) == 0)
        {
            try
            {
                parsed.tol = std::stod(token.substr(4));
            }
            catch (const std::exception&)
            {
                throw Error(ErrorCode::InvalidArgument, fmt::format("bad tolerance '{}'", token));
            }
            continue;
        }
        raw.push_back(token);
    }
    parsed.ids = expand_ids(raw);
    return parsed;
}

struct Outcome
{
    bool passed;
    std::string reason;
};

Outcome evaluate(const CanvasState& canvas, const Parsed& a)
{
    auto elements = std::vector<const Element*> {};
    for (auto const& id: a.ids)
    {
        auto const* e = canvas.find(id);
        if (!e)
            return { false, fmt::format("unknown element '{}'", id) };
        elements.push_back(e);
    }
    auto const need = [&](std::size_t n) -> std::optional<Outcome> {
        if (elements.size() < n)
            return Outcome { false, fmt::format("'{}' needs at least {} element(s)", a.keyword, n) };
        return std::nullopt;
    };
    auto fits = [&]() {
        auto out = std::vector<CircleFit> {};
        for (auto const* e: elements)
            out.push_back(fit_circle(element_points(*e)));
        return out;
    };

    try
    {
        if (a.keyword == "circle")
        {
            if (auto fail = need(1))
                return *fail;
            auto const tol = a.tol.value_or(5.0);
            auto const fit = fit_circle(element_points(*elements[0]));
            if (fit.rms_residual > tol)
                return { false, fmt::format("{} fit residual {:.3f} > {}", elements[0]->id, fit.rms_residual, tol) };
            return { true, fmt::format("radius {:.3f}", fit.radius) };
        }
        if (a.keyword == "collinear")
        {
            if (auto fail = need(2))
                return *fail;
            auto const tol = a.tol.value_or(5.0);
            auto centres = std::vector<Point> {};
            for (auto const& f: fits())
                centres.push_back(f.center);
            auto const line = fit_line(centres);
            if (line.max_distance > tol)
                return { false, fmt::format("centres deviate {:.3f} px from a line (tol {})", line.max_distance, tol) };
            return { true, fmt::format("max deviation {:.3f} px", line.max_distance) };
        }
        if (a.keyword == "increasing-radius")
        {
            if (auto fail = need(2))
                return *fail;
            auto const f = fits();
            for (std::size_t i = 1; i < f.size(); ++i)
                if (!(f[i].radius > f[i - 1].radius))
                    return { false,
                             fmt::format("radius of {} ({:.3f}) is not larger than {} ({:.3f})",
                                         a.ids[i], f[i].radius, a.ids[i - 1], f[i - 1].radius) };
            return { true, {} };
        }
        if (a.keyword == "contains")
        {
            if (auto fail = need(2))
                return *fail;
            auto const hull = convex_hull(element_points(*elements[0]));
            auto const tol = a.tol.value_or(0.0);
            for (std::size_t i = 1; i < elements.size(); ++i)
                for (auto p: element_points(*elements[i]))
                    if (!hull_contains(hull, p, tol))
                        return { false,
                                 fmt::format("{} is not enclosed by {} (point {:.1f},{:.1f})", elements[i]->id,
                                             elements[0]->id, p.x, p.y) };
            return { true, {} };
        }
        if (a.keyword == "left-of" || a.keyword == "right-of")
        {
            if (auto fail = need(2))
                return *fail;
            auto const& l = a.keyword == "left-of" ? *elements[0] : *elements[1];
            auto const& r = a.keyword == "left-of" ? *elements[1] : *elements[0];
            if (l.bbox.max_x < r.bbox.min_x)
                return { true, {} };
            return { false, fmt::format("{} is not entirely left of {}", l.id, r.id) };
        }
    }
    catch (const Error& e)
    {
        return { false, e.what() };
    }
    throw Error(ErrorCode::UnknownAssertion, fmt::format("unknown assertion '{}'", a.keyword));
}

bool known(const std::string& keyword)
{
    for (auto k: { "circle", "collinear", "increasing-radius", "contains", "left-of", "right-of" })
        if (keyword == k)
            return true;
    return false;
}

} // namespace

std::vector<AssertionResult> verify(const CanvasState& canvas, const std::string& script)
{
    auto results = std::vector<AssertionResult> {};
    auto in = std::istringstream(script);
    auto number = std::size_t { 0 };
    for (std::string line; std::getline(in, line);)
    {
        ++number;
        if (auto const hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto const first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);

        auto const parsed = parse_line(line);
        if (!known(parsed.keyword))
            throw Error(ErrorCode::UnknownAssertion,
                        fmt::format("line {}: unknown assertion '{}'", number, parsed.keyword),
                        { { "line", number } });
        auto result = AssertionResult { number, line, false, {} };
        if (canvas.elements.empty())
            result.reason = "EmptyCanvas";
        else
        {
            auto const outcome = evaluate(canvas, parsed);
            result.passed = outcome.passed;
            result.reason = outcome.reason;
        }
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace companion::cli
