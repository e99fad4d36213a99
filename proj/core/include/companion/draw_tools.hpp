// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/geometry.hpp>
#include <companion/random.hpp>

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace companion
{

/// Maximum distance between a flattened curve and the true curve, px.
inline constexpr double kChordTolerance = 0.25;

/// Fill density. Hatching reads it as lines per 100 px of perpendicular
/// extent, scribbles as samples per 1000 px^2 of area. Valid range (0, 100].
class Density
{
  public:
    explicit Density(double value);
    [[nodiscard]] double value() const noexcept { return _value; }

  private:
    double _value;
};

struct Segment
{
    Point start;
    Point end;
};

struct Circle
{
    Point center;
    double radius = 0.0;
};

/// One two-point polyline per segment, order preserved.
std::vector<Polyline> draw_segments(std::span<const Segment> segments);

/// Closed regular polygon per circle with n = max(16, ceil(pi / acos(1 - eps/r)))
/// sides, so the sagitta stays under kChordTolerance. First point repeated last.
std::vector<Polyline> draw_circles(std::span<const Circle> circles);
std::size_t circle_segment_count(double radius);

/// Centripetal Catmull-Rom through every keypoint, flattened to
/// kChordTolerance. Keypoints appear in the output verbatim.
Polyline draw_splines(std::span<const Point> keypoints);

/// Same curve as draw_splines; kept as its own tool name.
Polyline draw_path(std::span<const Point> keypoints);

/// Hershey simplex lettering, capital height = `height`, left-aligned on the
/// baseline through `origin`.
std::vector<Polyline> draw_text(std::string_view text, Point origin, double height);

/// Organic fill: uniform rejection samples inside `region`, visited in greedy
/// nearest-neighbour order, joined by a spline and clipped to the region.
std::vector<Polyline> draw_scribbles(const Polygon& region, Density density, RandomSource& rng);

/// Parallel chords at `angle_deg` spaced 100/density px apart, intersected
/// with `region` under the even-odd rule. `cross` adds a family at +90 deg.
std::vector<Polyline> draw_hatching(const Polygon& region, Density density, double angle_deg, bool cross);

struct ScribbleStyle
{
    double amplitude = 6.0;
    double wavelength = 14.0;
};

/// A wavy line oscillating around the central spline through `keypoints`.
/// Each half wave gets its own amplitude jitter in [0.8, 1.2].
Polyline draw_scribbly_splines(std::span<const Point> keypoints, ScribbleStyle style, RandomSource& rng);

/// Retraces `stroke` `passes` times, pass k shifted along the local normal by
/// offset * (k - (passes - 1) / 2).
std::vector<Polyline> thicken(const Polyline& stroke, int passes, double offset = 1.0);

} // namespace companion
