// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"
#include "test_util.hpp"

#include <commands.hpp>
#include <verify.hpp>

#include <companion/export.hpp>

#include <doctest.h>
#include <fmt/format.h>

#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace companion;
using namespace companion::cli;
using testutil::code_of;
namespace fs = std::filesystem;

namespace
{

std::vector<Point> circle_points(Point c, double r, int n, double from = 0.0, double to = 2 * std::numbers::pi)
{
    auto out = std::vector<Point> {};
    for (int i = 0; i < n; ++i)
    {
        auto const t = from + (to - from) * i / n;
        out.push_back({ c.x + r * std::cos(t), c.y + r * std::sin(t) });
    }
    return out;
}

Element human(std::string id, std::vector<Point> points)
{
    return Element::make(std::move(id), Author::human, { Polyline(std::move(points)) });
}

CanvasState golden_canvas(const std::string& name)
{
    return load_canvas(testutil::source_path("scenarios/golden/" + name + "/canvas.json"));
}

} // namespace

TEST_CASE("circle fit agrees with the geometric fit")
{
    auto fx = oracle::Fixtures(17);
    for (int trial = 0; trial < 200; ++trial)
    {
        auto const c = fx.point(100, 1100, 100, 800);
        auto const r = fx.uniform(20, 300);
        auto pts = circle_points(c, r, fx.integer(8, 80));

        auto const exact = fit_circle(pts);
        CHECK(std::abs(exact.center.x - c.x) < 1e-8);
        CHECK(std::abs(exact.center.y - c.y) < 1e-8);
        CHECK(std::abs(exact.radius - r) < 1e-8);
        CHECK(exact.rms_residual < 1e-8);

        // hand-drawn wobble: the algebraic and geometric optima stay close on full circles
        for (auto& p: pts)
            p = { p.x + fx.uniform(-0.02, 0.02) * r, p.y + fx.uniform(-0.02, 0.02) * r };
        auto const fit = fit_circle(pts);
        auto const ref = oracle::geometric_circle_fit(pts);
        CHECK(std::hypot(fit.center.x - ref.center.x, fit.center.y - ref.center.y) < 0.01 * r);
        CHECK(std::abs(fit.radius - ref.radius) < 0.01 * r);
        auto rms = 0.0;
        for (auto p: pts)
            rms += std::pow(std::hypot(p.x - fit.center.x, p.y - fit.center.y) - fit.radius, 2);
        CHECK(fit.rms_residual == doctest::Approx(std::sqrt(rms / pts.size())).epsilon(1e-9));
    }
    CHECK(code_of([] { fit_circle(std::vector<Point> { { 0, 0 }, { 1, 1 } }); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { fit_circle(std::vector<Point> { { 0, 0 }, { 1, 1 }, { 2, 2 }, { 5, 5 } }); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("line fit")
{
    auto fx = oracle::Fixtures(5);
    for (int trial = 0; trial < 200; ++trial)
    {
        auto const a = fx.point(0, 1200, 0, 900);
        auto const angle = fx.uniform(0, std::numbers::pi);
        auto const d = Point { std::cos(angle), std::sin(angle) };
        auto pts = std::vector<Point> {};
        for (int i = 0, n = fx.integer(2, 30); i < n; ++i)
        {
            auto const t = fx.uniform(-300, 300);
            pts.push_back({ a.x + t * d.x, a.y + t * d.y });
        }
        auto const fit = fit_line(pts);
        CHECK(fit.max_distance < 1e-7);
        CHECK(std::abs(fit.direction.x * d.y - fit.direction.y * d.x) < 1e-9);
        CHECK(std::hypot(fit.direction.x, fit.direction.y) == doctest::Approx(1.0).epsilon(1e-12));

        // offsets perpendicular to the line are recovered exactly by the principal axis
        pts.push_back({ a.x - 7 * d.y, a.y + 7 * d.x });
        pts.push_back({ a.x + 7 * d.y, a.y - 7 * d.x });
        Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), 2);
        auto mean = Eigen::Vector2d(0, 0);
        for (auto p: pts)
            mean += Eigen::Vector2d(p.x, p.y) / static_cast<double>(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
            m.row(static_cast<Eigen::Index>(i)) = Eigen::Vector2d(pts[i].x, pts[i].y) - mean;
        auto const svd = Eigen::JacobiSVD<Eigen::MatrixXd>(m, Eigen::ComputeThinV);
        auto const normal = svd.matrixV().col(1);
        auto worst = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            worst = std::max(worst, std::abs(m.row(static_cast<Eigen::Index>(i)).dot(normal)));
        CHECK(fit_line(pts).max_distance == doctest::Approx(worst).epsilon(1e-9));
    }
}

TEST_CASE("verify scripts")
{
    auto canvas = CanvasState {};
    canvas = add_element(canvas, human("", circle_points({ 300, 450 }, 80, 60)), AddPolicy::reject);
    canvas = add_element(canvas, human("", circle_points({ 600, 450 }, 100, 60)), AddPolicy::reject);
    canvas = add_element(canvas, human("", circle_points({ 900, 450 }, 120, 60)), AddPolicy::reject);
    canvas = add_element(canvas, human("", { { 150, 250 }, { 600, 250 }, { 1060, 250 }, { 1060, 650 }, { 150, 650 }, { 150, 250 } }), AddPolicy::reject);

    auto const passing = verify(canvas, "# all good\n"
                                        "circle e1\n"
                                        "circle e2 tol=0.5\n"
                                        "collinear e1 e2 e3 tol=1\n"
                                        "increasing-radius e1 e2 e3\n"
                                        "contains e4 e1 e2 e3\n"
                                        "left-of e1 e2\n"
                                        "right-of e3 e2\n"
                                        "\n");
    REQUIRE(passing.size() == 7);
    for (auto const& r: passing)
        CHECK_MESSAGE(r.passed, r.text, ": ", r.reason);
    CHECK(passing.front().line == 2);

    auto const failing = verify(canvas, "circle e4\n"
                                        "increasing-radius e3 e2 e1\n"
                                        "contains e1 e2\n"
                                        "left-of e2 e1\n"
                                        "right-of e1 e4\n"
                                        "circle e9\n");
    REQUIRE(failing.size() == 6);
    for (auto const& r: failing)
    {
        CHECK_MESSAGE(!r.passed, r.text);
        CHECK(!r.reason.empty());
    }

    // moving the middle circle off the line breaks collinearity
    auto bent = CanvasState {};
    bent = add_element(bent, human("", circle_points({ 300, 450 }, 80, 60)), AddPolicy::reject);
    bent = add_element(bent, human("", circle_points({ 600, 300 }, 100, 60)), AddPolicy::reject);
    bent = add_element(bent, human("", circle_points({ 900, 450 }, 120, 60)), AddPolicy::reject);
    CHECK(!verify(bent, "collinear e1 e2 e3 tol=5").front().passed);
    CHECK(verify(bent, "collinear e1 e2 e3 tol=200").front().passed);

    for (auto const& r: verify(CanvasState {}, "circle e1\nleft-of e1 e2\n"))
    {
        CHECK(!r.passed);
        CHECK(r.reason == "EmptyCanvas");
    }
    CHECK(code_of([&] { verify(canvas, "circle e1\nsquare e2\n"); }) == ErrorCode::UnknownAssertion);
}

TEST_CASE("shipped scenarios verify against their goldens")
{
    for (auto const name: { "three-circles", "hare-and-turtle" })
    {
        auto const script = testutil::slurp(testutil::source_path(fmt::format("scenarios/{}.verify", name)));
        for (auto const& r: verify(golden_canvas(name), script))
            CHECK_MESSAGE(r.passed, name, ": ", r.text, ": ", r.reason);
    }
    auto out = std::ostringstream {};
    auto err = std::ostringstream {};
    CHECK(cmd_verify(testutil::source_path("scenarios/golden/three-circles/transcript.json"),
                     testutil::source_path("scenarios/three-circles.verify"), out, err)
          == exit_pass);
}

TEST_CASE("illustrate reproduces the golden runs")
{
    ::setenv("SOURCE_DATE_EPOCH", "0", 1);
    auto const dir = testutil::scratch_dir("illustrate");

    struct Case
    {
        std::string name;
        std::string prompt;
        std::uint64_t seed;
    };
    for (auto const& c: { Case { "three-circles", testutil::slurp(testutil::source_path("scenarios/three-circles.prompt")), 7 },
                          Case { "hare-and-turtle", testutil::slurp(testutil::source_path("scenarios/hare-and-turtle.story")), 11 } })
    {
        auto options = IllustrateOptions {};
        options.prompt = c.prompt;
        while (!options.prompt.empty() && options.prompt.back() == '\n')
            options.prompt.pop_back();
        options.backend = "scripted:" + testutil::source_path("scenarios/" + c.name + ".backend.json").string();
        options.seed = c.seed;
        auto const result = illustrate(options, std::cerr);
        CHECK(result.stop == StopReason::completed);
        write_artifacts(dir / c.name, result.transcript, result.canvas);

        auto const golden = testutil::source_path("scenarios/golden/" + c.name);
        CHECK(export_svg(result.canvas) == testutil::slurp(golden / "drawing.svg"));
        CHECK(export_pen_program(result.canvas) == testutil::slurp(golden / "drawing.pen"));
        CHECK(testutil::slurp(dir / c.name / "canvas.json") == testutil::slurp(golden / "canvas.json"));
        CHECK(replay(result.transcript) == result.canvas);
    }
    ::unsetenv("SOURCE_DATE_EPOCH");
    fs::remove_all(dir);
}

TEST_CASE("completion phrase")
{
    CHECK(signals_completion(AgentReply { "The drawing is Complete.", {} }, "complete"));
    CHECK(!signals_completion(AgentReply { "complete", { ToolCall { {}, "draw-circles", {}, {} } } }, "complete"));
    CHECK(!signals_completion(AgentReply { "more to come", {} }, "complete"));
}

TEST_CASE("ablation writes one drawing per subject and mode")
{
    auto const dir = testutil::scratch_dir("ablation");
    auto run = [&](const fs::path& out) {
        auto options = AblationOptions {};
        options.subjects = { "tree", "hot air balloon" };
        options.backend = "scripted:" + testutil::source_path("scenarios/three-circles.backend.json").string();
        options.library = testutil::source_path("library/vocabulary.json");
        options.seed = 3;
        options.out = out;
        auto sink = std::ostringstream {};
        auto log = std::ostringstream {};
        CHECK(cmd_ablation(options, sink, log) == exit_pass);
        CHECK(sink.str() == fmt::format("2 subject(s), 6 drawing(s), sheet {}\n", (out / "index.html").string()));
    };
    run(dir / "a");
    run(dir / "b");

    auto svgs = std::vector<fs::path> {};
    for (auto const& item: fs::recursive_directory_iterator(dir / "a"))
        if (item.path().extension() == ".svg" && item.path().filename() != "drawing.svg")
            svgs.push_back(fs::relative(item.path(), dir / "a"));
    std::sort(svgs.begin(), svgs.end());
    CHECK(svgs
          == std::vector<fs::path> { "hot-air-balloon/images-methods.svg", "hot-air-balloon/images.svg", "hot-air-balloon/none.svg",
                                     "tree/images-methods.svg", "tree/images.svg", "tree/none.svg" });

    auto const sheet = testutil::slurp(dir / "a" / "index.html");
    for (auto const& svg: svgs)
    {
        CHECK(sheet.find(svg.string()) != std::string::npos);
        CHECK(testutil::slurp(dir / "a" / svg) == testutil::slurp(dir / "b" / svg));
    }
    CHECK(sheet == testutil::slurp(dir / "b" / "index.html"));

    auto options = AblationOptions {};
    auto sink = std::ostringstream {};
    CHECK(cmd_ablation(options, sink, sink) == exit_usage);
    fs::remove_all(dir);
}
