// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/geometry.hpp>
#include <companion/image.hpp>

#include <array>
#include <span>

namespace companion
{

/// Projective map between planes; stored row-major, scaled so h33 = 1
/// (unit Frobenius norm in the rare case h33 vanishes).
class Homography
{
  public:
    /// Throws DegenerateConfiguration unless |det| > 1e-12.
    explicit Homography(const std::array<double, 9>& m);
    static Homography identity();

    [[nodiscard]] const std::array<double, 9>& matrix() const noexcept { return _m; }
    [[nodiscard]] double operator()(int row, int col) const { return _m[static_cast<std::size_t>(row * 3 + col)]; }
    [[nodiscard]] Point apply(Point p) const;
    [[nodiscard]] Homography inverse() const;
    [[nodiscard]] double determinant() const;

  private:
    std::array<double, 9> _m;
};

/// Direct linear transform from four correspondences, solved as an 8x8 system
/// on Hartley-normalised coordinates. Throws DegenerateConfiguration when
/// three source (or destination) points are collinear.
Homography solve_homography(std::span<const Point, 4> src, std::span<const Point, 4> dst);

/// Resamples `image` into an `out_width` x `out_height` frame where `h` maps
/// input pixel coordinates to output coordinates. Inverse mapping with
/// bilinear sampling; samples falling outside the input are paper white.
GrayImage warp(const GrayImage& image, const Homography& h, int out_width, int out_height);

struct ClaheParams
{
    int tiles_x = 8;
    int tiles_y = 8;
    double clip_limit = 2.0;
};

/// Per-tile equalisation mapping (clipped + redistributed histogram). A tile
/// holding a single grey level maps through the identity.
std::array<std::uint8_t, 256> clahe_tile_mapping(std::span<const std::uint8_t> tile_pixels, double clip_limit);

/// Contrast limited adaptive histogram equalisation with bilinear blending of
/// the tile mappings. Throws ImageTooSmall when the image is smaller than the
/// tile grid.
GrayImage clahe(const GrayImage& image, ClaheParams params = {});

/// Rectifies a photographed page (corners in photo order top-left, top-right,
/// bottom-right, bottom-left) onto the canvas frame and enhances faint marks.
GrayImage rectify_page(const GrayImage& photo,
                       std::span<const Point, 4> corners,
                       int canvas_width,
                       int canvas_height,
                       ClaheParams params = {});

} // namespace companion
