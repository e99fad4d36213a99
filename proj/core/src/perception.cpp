// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/perception.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace companion
{

namespace
{

using Mat3 = std::array<double, 9>;

Mat3 multiply(const Mat3& a, const Mat3& b)
{
    auto out = Mat3 {};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
        {
            auto sum = 0.0;
            for (int k = 0; k < 3; ++k)
                sum += a[static_cast<std::size_t>(r * 3 + k)] * b[static_cast<std::size_t>(k * 3 + c)];
            out[static_cast<std::size_t>(r * 3 + c)] = sum;
        }
    return out;
}

double det3(const Mat3& m)
{
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 normalise(Mat3 m)
{
    auto const s = std::abs(m[8]) > 1e-12 ? m[8] : std::sqrt(std::inner_product(m.begin(), m.end(), m.begin(), 0.0));
    for (auto& v: m)
        v /= s;
    return m;
}

// Similarity taking the points' centroid to the origin and their mean
// distance from it to sqrt(2).
Mat3 hartley(std::span<const Point, 4> pts)
{
    auto c = Point {};
    for (auto p: pts)
        c = c + p * 0.25;
    auto mean = 0.0;
    for (auto p: pts)
        mean += distance(p, c) / 4.0;
    auto const s = std::sqrt(2.0) / mean;
    return { s, 0.0, -s * c.x, 0.0, s, -s * c.y, 0.0, 0.0, 1.0 };
}

Point apply(const Mat3& m, Point p)
{
    auto const w = m[6] * p.x + m[7] * p.y + m[8];
    return { (m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w };
}

void require_general_position(std::span<const Point, 4> pts, const char* which)
{
    auto extent = 0.0;
    for (auto a: pts)
        for (auto b: pts)
            extent = std::max(extent, distance(a, b));
    if (!(extent > 0.0))
        throw Error(ErrorCode::DegenerateConfiguration, fmt::format("{} points coincide", which));
    for (std::size_t i = 0; i < 4; ++i)
    {
        auto const& a = pts[(i + 1) % 4];
        auto const& b = pts[(i + 2) % 4];
        auto const& c = pts[(i + 3) % 4];
        if (std::abs(cross(b - a, c - a)) <= 1e-9 * extent * extent)
            throw Error(ErrorCode::DegenerateConfiguration, fmt::format("three {} points are collinear", which));
    }
}

} // namespace

Homography::Homography(const std::array<double, 9>& m): _m(normalise(m))
{
    for (auto v: _m)
        if (!std::isfinite(v))
            throw Error(ErrorCode::DegenerateConfiguration, "homography has non-finite entries");
    if (!(std::abs(determinant()) > 1e-12))
        throw Error(ErrorCode::DegenerateConfiguration, "homography is singular");
}

Homography Homography::identity()
{
    return Homography({ 1, 0, 0, 0, 1, 0, 0, 0, 1 });
}

Point Homography::apply(Point p) const
{
    return companion::apply(_m, p);
}

double Homography::determinant() const
{
    return det3(_m);
}

Homography Homography::inverse() const
{
    auto const& m = _m;
    auto const d = determinant();
    return Homography({
        (m[4] * m[8] - m[5] * m[7]) / d,
        (m[2] * m[7] - m[1] * m[8]) / d,
        (m[1] * m[5] - m[2] * m[4]) / d,
        (m[5] * m[6] - m[3] * m[8]) / d,
        (m[0] * m[8] - m[2] * m[6]) / d,
        (m[2] * m[3] - m[0] * m[5]) / d,
        (m[3] * m[7] - m[4] * m[6]) / d,
        (m[1] * m[6] - m[0] * m[7]) / d,
        (m[0] * m[4] - m[1] * m[3]) / d,
    });
}

Homography solve_homography(std::span<const Point, 4> src, std::span<const Point, 4> dst)
{
    require_general_position(src, "source");
    require_general_position(dst, "destination");

    auto const ts = hartley(src);
    auto const td = hartley(dst);

    // A h = b with h33 fixed to 1 in normalised coordinates.
    double a[8][9] = {};
    for (std::size_t i = 0; i < 4; ++i)
    {
        auto const p = companion::apply(ts, src[i]);
        auto const q = companion::apply(td, dst[i]);
        double r0[9] = { p.x, p.y, 1, 0, 0, 0, -q.x * p.x, -q.x * p.y, q.x };
        double r1[9] = { 0, 0, 0, p.x, p.y, 1, -q.y * p.x, -q.y * p.y, q.y };
        std::copy(std::begin(r0), std::end(r0), a[2 * i]);
        std::copy(std::begin(r1), std::end(r1), a[2 * i + 1]);
    }
    for (int col = 0; col < 8; ++col)
    {
        auto pivot = col;
        for (int r = col + 1; r < 8; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12)
            throw Error(ErrorCode::DegenerateConfiguration, "correspondences do not determine a homography");
        std::swap(a[pivot], a[col]);
        for (int r = 0; r < 8; ++r)
        {
            if (r == col)
                continue;
            auto const f = a[r][col] / a[col][col];
            for (int c = col; c < 9; ++c)
                a[r][c] -= f * a[col][c];
        }
    }
    auto hn = Mat3 {};
    for (int i = 0; i < 8; ++i)
        hn[static_cast<std::size_t>(i)] = a[i][8] / a[i][i];
    hn[8] = 1.0;

    auto const td_inv = Homography(td).inverse().matrix();
    return Homography(multiply(td_inv, multiply(hn, ts)));
}

GrayImage warp(const GrayImage& image, const Homography& h, int out_width, int out_height)
{
    auto out = GrayImage(out_width, out_height);
    if (image.empty())
        return out;
    auto const inv = h.inverse();
    auto const max_x = image.width() - 1;
    auto const max_y = image.height() - 1;
    for (int y = 0; y < out_height; ++y)
        for (int x = 0; x < out_width; ++x)
        {
            auto const s = inv.apply({ static_cast<double>(x), static_cast<double>(y) });
            if (!is_finite(s) || s.x < 0.0 || s.y < 0.0 || s.x > max_x || s.y > max_y)
                continue;
            auto const x0 = std::min(static_cast<int>(s.x), std::max(0, max_x - 1));
            auto const y0 = std::min(static_cast<int>(s.y), std::max(0, max_y - 1));
            auto const x1 = std::min(x0 + 1, max_x);
            auto const y1 = std::min(y0 + 1, max_y);
            auto const fx = s.x - x0;
            auto const fy = s.y - y0;
            auto const top = image.at(x0, y0) * (1 - fx) + image.at(x1, y0) * fx;
            auto const bottom = image.at(x0, y1) * (1 - fx) + image.at(x1, y1) * fx;
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(top * (1 - fy) + bottom * fy), 0L, 255L));
        }
    return out;
}

std::array<std::uint8_t, 256> clahe_tile_mapping(std::span<const std::uint8_t> tile_pixels, double clip_limit)
{
    auto lut = std::array<std::uint8_t, 256> {};
    std::iota(lut.begin(), lut.end(), 0);
    if (tile_pixels.empty())
        return lut;

    auto hist = std::array<double, 256> {};
    for (auto v: tile_pixels)
        hist[v] += 1.0;
    if (std::count_if(hist.begin(), hist.end(), [](double c) { return c > 0.0; }) < 2)
        return lut;

    auto const n = static_cast<double>(tile_pixels.size());
    if (std::isfinite(clip_limit) && clip_limit > 0.0)
    {
        auto const ceiling = clip_limit * n / 256.0;
        auto excess = 0.0;
        for (auto& c: hist)
            if (c > ceiling)
            {
                excess += c - ceiling;
                c = ceiling;
            }
        for (auto& c: hist)
            c += excess / 256.0;
    }

    auto cdf = 0.0;
    for (std::size_t v = 0; v < 256; ++v)
    {
        cdf += hist[v];
        lut[v] = static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * cdf / n), 0L, 255L));
    }
    return lut;
}

namespace
{

// Start offsets of `tiles` nearly equal spans covering [0, size).
std::vector<int> tile_edges(int size, int tiles)
{
    auto edges = std::vector<int>(static_cast<std::size_t>(tiles) + 1);
    for (int i = 0; i <= tiles; ++i)
        edges[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<long>(i) * size / tiles);
    return edges;
}

struct Blend
{
    int lo = 0;
    int hi = 0;
    double w = 0.0; ///< weight of `hi`
};

std::vector<Blend> blend_axis(const std::vector<int>& edges, int size)
{
    auto const tiles = static_cast<int>(edges.size()) - 1;
    auto centres = std::vector<double>(static_cast<std::size_t>(tiles));
    for (int i = 0; i < tiles; ++i)
        centres[static_cast<std::size_t>(i)] = (edges[static_cast<std::size_t>(i)] + edges[static_cast<std::size_t>(i + 1)] - 1) / 2.0;

    auto out = std::vector<Blend>(static_cast<std::size_t>(size));
    for (int p = 0; p < size; ++p)
    {
        auto& b = out[static_cast<std::size_t>(p)];
        if (p <= centres.front())
            b = { 0, 0, 0.0 };
        else if (p >= centres.back())
            b = { tiles - 1, tiles - 1, 0.0 };
        else
        {
            auto i = 0;
            while (centres[static_cast<std::size_t>(i + 1)] < p)
                ++i;
            auto const c0 = centres[static_cast<std::size_t>(i)];
            auto const c1 = centres[static_cast<std::size_t>(i + 1)];
            b = { i, i + 1, (p - c0) / (c1 - c0) };
        }
    }
    return out;
}

} // namespace

GrayImage clahe(const GrayImage& image, ClaheParams params)
{
    if (params.tiles_x <= 0 || params.tiles_y <= 0)
        throw Error(ErrorCode::InvalidArgument, "tile grid must be positive");
    if (image.width() < params.tiles_x || image.height() < params.tiles_y)
        throw Error(ErrorCode::ImageTooSmall,
                    fmt::format("{}x{} image is smaller than the {}x{} tile grid",
                                image.width(), image.height(), params.tiles_x, params.tiles_y));

    auto const ex = tile_edges(image.width(), params.tiles_x);
    auto const ey = tile_edges(image.height(), params.tiles_y);

    auto luts = std::vector<std::array<std::uint8_t, 256>>();
    luts.reserve(static_cast<std::size_t>(params.tiles_x * params.tiles_y));
    auto buffer = std::vector<std::uint8_t> {};
    for (int ty = 0; ty < params.tiles_y; ++ty)
        for (int tx = 0; tx < params.tiles_x; ++tx)
        {
            buffer.clear();
            for (int y = ey[static_cast<std::size_t>(ty)]; y < ey[static_cast<std::size_t>(ty + 1)]; ++y)
                for (int x = ex[static_cast<std::size_t>(tx)]; x < ex[static_cast<std::size_t>(tx + 1)]; ++x)
                    buffer.push_back(image.at(x, y));
            luts.push_back(clahe_tile_mapping(buffer, params.clip_limit));
        }

    auto const bx = blend_axis(ex, image.width());
    auto const by = blend_axis(ey, image.height());
    auto const lut = [&](int tx, int ty) -> const auto& { return luts[static_cast<std::size_t>(ty * params.tiles_x + tx)]; };

    auto out = GrayImage(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y)
    {
        auto const& row = by[static_cast<std::size_t>(y)];
        for (int x = 0; x < image.width(); ++x)
        {
            auto const& col = bx[static_cast<std::size_t>(x)];
            auto const v = image.at(x, y);
            auto const top = lut(col.lo, row.lo)[v] * (1 - col.w) + lut(col.hi, row.lo)[v] * col.w;
            auto const bottom = lut(col.lo, row.hi)[v] * (1 - col.w) + lut(col.hi, row.hi)[v] * col.w;
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(top * (1 - row.w) + bottom * row.w), 0L, 255L));
        }
    }
    return out;
}

GrayImage rectify_page(
    const GrayImage& photo, std::span<const Point, 4> corners, int canvas_width, int canvas_height, ClaheParams params)
{
    if (photo.empty())
        throw Error(ErrorCode::InvalidImage, "photo is empty");
    auto const w = static_cast<double>(canvas_width);
    auto const h = static_cast<double>(canvas_height);
    auto const page = std::array<Point, 4> { Point { 0, 0 }, Point { w, 0 }, Point { w, h }, Point { 0, h } };
    auto const homography = solve_homography(corners, page);
    return clahe(warp(photo, homography, canvas_width, canvas_height), params);
}

} // namespace companion
