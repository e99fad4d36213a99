// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/canvas.hpp>

#include <span>
#include <string>
#include <vector>

namespace companion::cli
{

struct CircleFit
{
    Point center;
    double radius = 0.0;
    double rms_residual = 0.0;
};

/// Algebraic (Kasa) least-squares circle through `points`. Throws
/// InvalidArgument for fewer than three points or collinear input.
CircleFit fit_circle(std::span<const Point> points);

struct LineFit
{
    Point centroid;
    Point direction; ///< unit vector
    double max_distance = 0.0;
};

/// Total least squares line; max_distance is the worst perpendicular offset.
LineFit fit_line(std::span<const Point> points);

struct AssertionResult
{
    std::size_t line = 0;
    std::string text;
    bool passed = false;
    std::string reason;
};

/// Evaluates a line-oriented assertion script against `canvas`:
///
///   circle e1 [tol=5]               element e1 is circle-like (rms fit residual)
///   collinear e1 e2 e3 [tol=5]      fitted centres lie on one line
///   increasing-radius e1 e2 e3      fitted radii strictly increase
///   contains e4 e1..e3              e4's convex hull holds every point of e1..e3
///   left-of e1 e2 / right-of e1 e2  bounding boxes strictly separated in x
///
/// '#' starts a comment. Unknown keywords raise UnknownAssertion; every
/// assertion fails with reason "EmptyCanvas" on an empty canvas.
std::vector<AssertionResult> verify(const CanvasState& canvas, const std::string& script);

} // namespace companion::cli
