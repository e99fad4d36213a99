// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/canvas.hpp>
#include <companion/geometry.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace companion
{

/// 8-bit grayscale raster, row-major.
class GrayImage
{
  public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 255);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    [[nodiscard]] int width() const noexcept { return _width; }
    [[nodiscard]] int height() const noexcept { return _height; }
    [[nodiscard]] bool empty() const noexcept { return _pixels.empty(); }
    [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return _pixels; }

    [[nodiscard]] std::uint8_t at(int x, int y) const { return _pixels[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return _pixels[index(x, y)]; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

  private:
    [[nodiscard]] std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(_width) + static_cast<std::size_t>(x);
    }

    int _width = 0;
    int _height = 0;
    std::vector<std::uint8_t> _pixels;
};

/// Black strokes on white at canvas resolution; what the agent sees when no
/// photograph is attached.
GrayImage rasterize(const CanvasState& canvas, double stroke_width = 2.0);

/// Decodes PNG bytes; colour input is reduced to luminance.
GrayImage decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const GrayImage& image);
GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& image);

/// Four "x y" lines, page corners in photo pixels.
std::array<Point, 4> read_corner_file(const std::filesystem::path& path);

} // namespace companion
