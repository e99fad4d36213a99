// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/image.hpp>

#include <fmt/format.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace companion
{

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : _width(width), _height(height)
{
    if (width < 0 || height < 0)
        throw Error(ErrorCode::InvalidImage, "image dimensions must be non-negative");
    _pixels.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : _width(width), _height(height), _pixels(std::move(pixels))
{
    if (width < 0 || height < 0
        || _pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error(ErrorCode::InvalidImage, "pixel buffer does not match dimensions");
}

GrayImage rasterize(const CanvasState& canvas, double stroke_width)
{
    auto const w = static_cast<int>(std::lround(canvas.constraints.width));
    auto const h = static_cast<int>(std::lround(canvas.constraints.height));
    auto image = GrayImage(w, h);
    auto const half = std::max(0.5, stroke_width / 2.0);

    for (auto const& element: canvas.elements)
        for (auto const& stroke: element.strokes)
        {
            auto const& pts = stroke.points();
            for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            {
                auto const a = pts[i];
                auto const b = pts[i + 1];
                auto const x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half)));
                auto const x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half)));
                auto const y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half)));
                auto const y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half)));
                for (int y = y0; y <= y1; ++y)
                    for (int x = x0; x <= x1; ++x)
                        if (distance_to_segment({ x + 0.5, y + 0.5 }, a, b) <= half)
                            image.at(x, y) = 0;
            }
        }
    return image;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes)
{
    auto png = png_image {};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()))
        throw Error(ErrorCode::InvalidImage, fmt::format("cannot decode PNG: {}", png.message));
    png.format = PNG_FORMAT_GRAY;
    auto pixels = std::vector<std::uint8_t>(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, pixels.data(), 0, nullptr))
    {
        auto const message = std::string(png.message);
        png_image_free(&png);
        throw Error(ErrorCode::InvalidImage, fmt::format("cannot decode PNG: {}", message));
    }
    return GrayImage(static_cast<int>(png.width), static_cast<int>(png.height), std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const GrayImage& image)
{
    if (image.empty())
        throw Error(ErrorCode::InvalidImage, "cannot encode an empty image");
    auto png = png_image {};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_GRAY;

    auto size = png_alloc_size_t { 0 };
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.pixels().data(), 0, nullptr))
        throw Error(ErrorCode::InvalidImage, fmt::format("cannot encode PNG: {}", png.message));
    auto out = std::vector<std::uint8_t>(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.pixels().data(), 0, nullptr))
        throw Error(ErrorCode::InvalidImage, fmt::format("cannot encode PNG: {}", png.message));
    out.resize(size);
    return out;
}

GrayImage read_png(const std::filesystem::path& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    auto const bytes = std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

void write_png(const std::filesystem::path& path, const GrayImage& image)
{
    auto const bytes = encode_png(image);
    auto out = std::ofstream(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::array<Point, 4> read_corner_file(const std::filesystem::path& path)
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    auto corners = std::array<Point, 4> {};
    auto count = std::size_t { 0 };
    auto line = std::string {};
    while (std::getline(in, line))
    {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        if (count == 4)
            throw Error(ErrorCode::InvalidDocument, "corner file has more than four points");
        auto fields = std::istringstream(line);
        if (!(fields >> corners[count].x >> corners[count].y))
            throw Error(ErrorCode::InvalidDocument, fmt::format("bad corner line '{}'", line));
        ++count;
    }
    if (count != 4)
        throw Error(ErrorCode::InvalidDocument, "corner file needs exactly four points");
    return corners;
}

} // namespace companion
