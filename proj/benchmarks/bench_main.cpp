// SPDX-License-Identifier: Apache-2.0
#include <companion/canvas.hpp>
#include <companion/draw_tools.hpp>
#include <companion/export.hpp>
#include <companion/perception.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace companion;

namespace
{

Polygon blob(int vertices, double r)
{
    auto pts = std::vector<Point> {};
    for (int i = 0; i < vertices; ++i)
    {
        auto const a = 2 * std::numbers::pi * i / vertices;
        auto const rr = r * (i % 2 ? 0.6 : 1.0);
        pts.push_back({ 600 + rr * std::cos(a), 450 + rr * std::sin(a) });
    }
    return Polygon(std::move(pts));
}

void hatching(benchmark::State& state)
{
    auto const poly = blob(14, 250);
    auto const density = Density(static_cast<double>(state.range(0)));
    for (auto _: state)
        benchmark::DoNotOptimize(draw_hatching(poly, density, 30.0, true));
}
BENCHMARK(hatching)->Arg(2)->Arg(10)->Arg(50);

void scribbles(benchmark::State& state)
{
    auto const poly = blob(10, 200);
    auto const density = Density(static_cast<double>(state.range(0)));
    auto seed = std::uint64_t { 0 };
    for (auto _: state)
    {
        auto rng = RandomSource(seed++);
        benchmark::DoNotOptimize(draw_scribbles(poly, density, rng));
    }
}
BENCHMARK(scribbles)->Arg(1)->Arg(5)->Arg(20);

void circles(benchmark::State& state)
{
    auto const c = Circle { { 600, 450 }, static_cast<double>(state.range(0)) };
    for (auto _: state)
        benchmark::DoNotOptimize(draw_circles(std::span(&c, 1)));
}
BENCHMARK(circles)->Arg(10)->Arg(100)->Arg(400);

void clahe_canvas(benchmark::State& state)
{
    auto img = GrayImage(1200, 900);
    for (int y = 0; y < 900; ++y)
        for (int x = 0; x < 1200; ++x)
            img.at(x, y) = static_cast<std::uint8_t>(120 + 40 * std::sin(x * 0.01) * std::cos(y * 0.013));
    for (auto _: state)
        benchmark::DoNotOptimize(clahe(img));
}
BENCHMARK(clahe_canvas)->Unit(benchmark::kMillisecond);

void svg_export(benchmark::State& state)
{
    auto canvas = CanvasState {};
    auto rng = RandomSource(1);
    for (int i = 0; i < state.range(0); ++i)
    {
        auto pts = std::vector<Point> {};
        for (int k = 0; k < 50; ++k)
            pts.push_back({ rng.uniform(0, 1200), rng.uniform(0, 900) });
        canvas = add_element(canvas, Element::make("", Author::human, { Polyline(std::move(pts)) }), AddPolicy::clip_then_accept);
    }
    for (auto _: state)
        benchmark::DoNotOptimize(export_svg(canvas));
}
BENCHMARK(svg_export)->Arg(10)->Arg(100);

} // namespace

BENCHMARK_MAIN();
