// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per primary criterion, scripted backends only.
#include "oracles.hpp"

#include <commands.hpp>
#include <verify.hpp>

#include <companion/canvas.hpp>
#include <companion/context.hpp>
#include <companion/draw_tools.hpp>
#include <companion/export.hpp>
#include <companion/instructions.hpp>
#include <companion/perception.hpp>
#include <companion/service.hpp>

#include <fmt/format.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <functional>
#include <future>
#include <iterator>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include <unistd.h>

using namespace companion;
namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace
{

// Tolerances and budgets.
constexpr double kBufferProbeBelow = 39.0;
constexpr double kBufferProbeAbove = 41.0;
constexpr double kClipTolerance = 1e-9;
constexpr double kChordLengthTolerance = 1e-6;
constexpr double kScribbleTolerance = 0.5;
constexpr double kKeypointTolerance = 1e-9;
constexpr double kCollinearTolerance = 1e-6;
constexpr double kSagittaLimit = 0.25;
constexpr double kMinLineExpected = 70.588;
constexpr double kMinLineTolerance = 0.001;
constexpr double kHomographyResidual = 1e-6;
constexpr double kCheckerboardFraction = 0.99;
constexpr int kCheckerboardIntensity = 2;
constexpr std::size_t kLibrarySize = 24;
constexpr double kVerifyTolerancePx = 5.0;
constexpr double kSuiteBudgetSeconds = 120.0;

struct Outcome
{
    bool passed = true;
    std::string detail;
};

/// Collects failed expectations; the first few make it into the report.
class Tally
{
  public:
    void expect(bool ok, const std::string& what)
    {
        ++_checks;
        if (ok)
            return;
        if (_failures.size() < 3)
            _failures.push_back(what);
        ++_failed;
    }
    [[nodiscard]] Outcome outcome(std::string summary) const
    {
        if (_failed == 0)
            return { true, fmt::format("{} ({} checks)", summary, _checks) };
        return { false, fmt::format("{}; {} of {} checks failed: {}", summary, _failed, _checks, fmt::join(_failures, " | ")) };
    }

  private:
    std::size_t _checks = 0;
    std::size_t _failed = 0;
    std::vector<std::string> _failures;
};

fs::path source(const std::string& relative)
{
    return fs::path(COMPANION_SOURCE_DIR) / relative;
}

std::string slurp(const fs::path& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / fmt::format("companion-acceptance-{}-{}", name, ::getpid());
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Element agent(std::vector<Point> points)
{
    return Element::make("", Author::agent, { Polyline(std::move(points)) });
}

bool has_violation(const ValidationReport& report, ViolationKind kind)
{
    return std::any_of(report.violations.begin(), report.violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

Outcome constraint_fidelity()
{
    auto t = Tally {};
    auto base = CanvasState {};
    base.constraints = InstructionParams {}.constraints();
    auto const anchor = std::vector<Point> { { 300, 400 }, { 500, 400 } };
    auto const canvas = add_element(base, agent(anchor), AddPolicy::reject);

    // probes below, right of and diagonal to the anchor; the bbox gap is the offset
    struct Probe
    {
        std::function<std::vector<Point>(double)> at;
        const char* where;
    };
    auto const probes = std::vector<Probe> {
        { [](double g) { return std::vector<Point> { { 300, 400 + g }, { 500, 400 + g } }; }, "below" },
        { [](double g) { return std::vector<Point> { { 500 + g, 300 }, { 500 + g, 500 } }; }, "right" },
        { [](double g) {
             auto const d = g / std::sqrt(2.0);
             return std::vector<Point> { { 500 + d, 400 + d }, { 600 + d, 500 + d } };
         },
          "diagonal" },
    };
    for (auto const& probe: probes)
    {
        auto const near = agent(probe.at(kBufferProbeBelow));
        auto const far = agent(probe.at(kBufferProbeAbove));
        t.expect(std::abs(bbox_distance(near.bbox, canvas.elements[0].bbox) - kBufferProbeBelow) < 1e-9,
                 fmt::format("{} probe gap", probe.where));
        auto const rejected = validate_placement(canvas, near);
        t.expect(!rejected.ok() && has_violation(rejected, ViolationKind::element_buffer), fmt::format("{} 39 px accepted", probe.where));
        t.expect(validate_placement(canvas, far).ok(), fmt::format("{} 41 px rejected", probe.where));
        auto code = std::optional<ErrorCode> {};
        try
        {
            (void) add_element(canvas, near, AddPolicy::reject);
        }
        catch (const Error& e)
        {
            code = e.code();
        }
        t.expect(code == ErrorCode::RejectedByConstraint, fmt::format("{} 39 px add not rejected", probe.where));
        t.expect(add_element(canvas, far, AddPolicy::reject).revision == 2, fmt::format("{} 41 px add failed", probe.where));
    }

    // fuzzed strokes crossing the margin: clipped output stays inside, inside vertices survive
    auto fx = oracle::Fixtures(30);
    auto const rect = base.constraints.margin_rect();
    auto clipped = 0;
    for (int i = 0; i < 2000; ++i)
    {
        auto pts = std::vector<Point> {};
        for (int k = 0, n = fx.integer(2, 12); k < n; ++k)
            pts.push_back(fx.point(-150, 1350, -150, 1050));
        auto stroke = std::optional<Element> {};
        try
        {
            stroke = Element::make("", Author::agent, { Polyline(pts) });
        }
        catch (const Error&)
        {
            continue;
        }
        auto out = std::optional<Element> {};
        try
        {
            out = clip_element(base.constraints, *stroke);
        }
        catch (const Error& e)
        {
            t.expect(e.code() == ErrorCode::EmptyElement, "unexpected clip error");
            continue;
        }
        ++clipped;
        auto inside_ok = true;
        for (auto const& line: out->strokes)
            for (auto p: line.points())
                inside_ok = inside_ok && p.x >= rect.min_x - kClipTolerance && p.x <= rect.max_x + kClipTolerance
                            && p.y >= rect.min_y - kClipTolerance && p.y <= rect.max_y + kClipTolerance;
        t.expect(inside_ok, fmt::format("stroke {} leaves the margin rectangle", i));
        for (auto const& p: stroke->strokes[0].points())
        {
            if (!(p.x > rect.min_x && p.x < rect.max_x && p.y > rect.min_y && p.y < rect.max_y))
                continue;
            auto kept = false;
            for (auto const& line: out->strokes)
                for (auto q: line.points())
                    kept = kept || distance(p, q) <= kClipTolerance;
            t.expect(kept, fmt::format("stroke {} lost an inside vertex", i));
        }
    }
    return t.outcome(fmt::format("39 px rejected, 41 px accepted; {} fuzzed strokes clipped to the 30 px margin", clipped));
}

Outcome hatching_oracle()
{
    auto t = Tally {};
    auto const square = Polygon({ { 100, 100 }, { 200, 100 }, { 200, 200 }, { 100, 200 } });
    auto const single = draw_hatching(square, Density(10), 0.0, false);
    auto const crossed = draw_hatching(square, Density(10), 0.0, true);
    auto const expected = static_cast<long>(std::floor(100.0 / 10.0));
    t.expect(std::labs(static_cast<long>(single.size()) - expected) <= 1, fmt::format("square gave {} chords", single.size()));
    for (auto const& c: single)
        t.expect(std::abs(c.length() - 100.0) <= kChordLengthTolerance, fmt::format("chord length {}", c.length()));
    t.expect(std::labs(static_cast<long>(crossed.size()) - 2 * static_cast<long>(single.size())) <= 1,
             fmt::format("cross gave {} chords", crossed.size()));

    auto fx = oracle::Fixtures(50);
    for (int i = 0; i < 50; ++i)
    {
        auto const verts = fx.convex_polygon(fx.point(300, 900, 250, 650), fx.uniform(30, 250), fx.uniform(30, 220));
        auto const density = fx.uniform(0.5, 20.0);
        auto const angle = fx.uniform(-180, 180);
        auto const got = draw_hatching(Polygon(verts), Density(density), angle, false);
        auto const want = oracle::convex_hatching(verts, 100.0 / density, angle);
        t.expect(got.size() == want.size(), fmt::format("polygon {}: {} chords, oracle {}", i, got.size(), want.size()));
        if (got.size() != want.size())
            continue;
        auto const rad = angle * std::numbers::pi / 180.0;
        auto const along = Point { std::cos(rad), std::sin(rad) };
        for (std::size_t k = 0; k < got.size(); ++k)
        {
            t.expect(std::abs(got[k].length() - want[k].length()) <= kChordLengthTolerance, fmt::format("polygon {} chord {} length", i, k));
            // brute-force scan along the chord's line: exactly one inside run for a convex region
            auto const a = got[k].front();
            auto const runs = oracle::sampled_inside_runs(verts, a, along, -600, 600, 0.05);
            t.expect(runs == 1, fmt::format("polygon {} chord {}: {} sampled runs", i, k, runs));
        }
    }
    return t.outcome(fmt::format("square: {} chords of 100 px, {} crossed; 50 convex polygons match the scanline oracle",
                                 single.size(), crossed.size()));
}

std::string strokes_bytes(const std::vector<Polyline>& strokes)
{
    auto out = std::string {};
    for (auto const& s: strokes)
    {
        for (auto p: s.points())
            out.append(reinterpret_cast<const char*>(&p), sizeof p);
        out.push_back('|');
    }
    return out;
}

Outcome scribble_containment()
{
    auto t = Tally {};
    auto fx = oracle::Fixtures(61);
    auto points = std::size_t { 0 };
    auto outside = std::size_t { 0 };
    for (int i = 0; i < 100; ++i)
    {
        auto const verts = i % 2 ? fx.convex_polygon(fx.point(300, 900, 250, 650), fx.uniform(40, 250), fx.uniform(40, 200))
                                 : fx.star_polygon(fx.point(300, 900, 250, 650), fx.uniform(30, 80), fx.uniform(100, 220), fx.integer(5, 11));
        auto const poly = Polygon(verts);
        auto const density = fx.uniform(0.5, 6.0);
        auto const seed = static_cast<std::uint64_t>(fx.integer(0, 1 << 30));
        auto rng = RandomSource(seed);
        auto const first = draw_scribbles(poly, Density(density), rng);
        for (auto const& s: first)
            for (auto p: s.points())
            {
                ++points;
                if (!oracle::inside_winding(verts, p) && oracle::boundary_distance(verts, p) > kScribbleTolerance)
                    ++outside;
            }
        auto again = RandomSource(seed);
        t.expect(strokes_bytes(first) == strokes_bytes(draw_scribbles(poly, Density(density), again)),
                 fmt::format("polygon {} not deterministic", i));
    }
    t.expect(outside == 0, fmt::format("{} points outside", outside));
    return t.outcome(fmt::format("{} points, {} outside by more than {} px; repeat runs byte-identical", points, outside, kScribbleTolerance));
}

Outcome splines_and_circles()
{
    auto t = Tally {};
    auto fx = oracle::Fixtures(72);
    auto worst_keypoint = 0.0;
    auto worst_line = 0.0;
    for (int i = 0; i < 300; ++i)
    {
        auto kp = std::vector<Point> {};
        for (int k = 0, n = fx.integer(2, 12); k < n; ++k)
            kp.push_back(fx.point(40, 1160, 40, 860));
        auto const line = draw_splines(kp);
        for (auto p: kp)
        {
            auto best = std::numeric_limits<double>::infinity();
            for (auto q: line.points())
                best = std::min(best, distance(p, q));
            worst_keypoint = std::max(worst_keypoint, best);
        }

        auto const a = fx.point(100, 1100, 100, 800);
        auto const angle = fx.uniform(0, std::numbers::pi);
        auto const dir = Point { std::cos(angle), std::sin(angle) };
        auto straight = std::vector<Point> {};
        for (int k = 0, n = fx.integer(2, 10); k < n; ++k)
        {
            auto const s = fx.uniform(-400, 400);
            straight.push_back({ a.x + s * dir.x, a.y + s * dir.y });
        }
        try
        {
            auto const curve = draw_splines(straight);
            for (auto p: curve.points())
                worst_line = std::max(worst_line, std::abs((p.x - a.x) * dir.y - (p.y - a.y) * dir.x));
        }
        catch (const Error& e)
        {
            t.expect(e.code() == ErrorCode::TooFewPoints || e.code() == ErrorCode::DegenerateStroke, "unexpected spline error");
        }
    }
    t.expect(worst_keypoint <= kKeypointTolerance, fmt::format("keypoint off by {}", worst_keypoint));
    t.expect(worst_line <= kCollinearTolerance, fmt::format("collinear output off by {}", worst_line));

    auto worst_sagitta = 0.0;
    for (int i = 0; i < 500; ++i)
    {
        auto const c = Circle { fx.point(400, 800, 400, 500), fx.uniform(1, 400) };
        auto const ring = draw_circles(std::span(&c, 1)).front().points();
        for (std::size_t k = 1; k < ring.size(); ++k)
        {
            auto const mid = (ring[k - 1] + ring[k]) * 0.5;
            worst_sagitta = std::max(worst_sagitta, c.radius - distance(mid, c.center));
            t.expect(std::abs(distance(ring[k], c.center) - c.radius) <= 1e-9, "circle vertex off the circle");
        }
    }
    t.expect(worst_sagitta <= kSagittaLimit, fmt::format("sagitta {}", worst_sagitta));
    return t.outcome(fmt::format("keypoint error {:.1e}, collinear deviation {:.1e}, worst sagitta {:.4f} px", worst_keypoint,
                                 worst_line, worst_sagitta));
}

Outcome instruction_template()
{
    auto t = Tally {};
    auto const params = InstructionParams {};
    auto const text = render_system_instructions(params);
    t.expect(text.find("1200 by 900") != std::string::npos, "no '1200 by 900'");
    t.expect(text.find("stay a minimum of 30 pixels away from the edges") != std::string::npos, "no 30 px edge clause");

    // the minimum line length as printed, against 10 mm over the px-to-mm scale
    auto const oracle_min = 10.0 / (170.0 / 1200.0);
    auto m = std::smatch {};
    auto printed = std::numeric_limits<double>::quiet_NaN();
    if (std::regex_search(text, m, std::regex(R"(lines should never be less than ([0-9.]+) pixels long)")))
        printed = std::stod(m[1]);
    t.expect(std::abs(printed - kMinLineExpected) <= kMinLineTolerance, fmt::format("min line printed as {}", printed));
    t.expect(std::abs(printed - oracle_min) <= 1e-9 * oracle_min, "printed minimum differs from 10/(170/1200)");
    t.expect(text == slurp(source("tests/data/system_instructions.txt")), "differs from the golden file");
    return t.outcome(fmt::format("min line {} px, golden bytes equal", format_real(printed)));
}

Outcome icl_assembly()
{
    auto t = Tally {};
    auto const manifest = source("library/vocabulary.json");
    auto counts = std::map<std::string, std::size_t> {};
    for (auto mode: { LibraryMode::images_and_methods, LibraryMode::images_only, LibraryMode::none })
    {
        auto const library = load_library(manifest, mode);
        auto const context = assemble_context(library);
        counts[std::string(to_string(mode))] = context.size();
        t.expect(library.entries.size() == kLibrarySize, fmt::format("library holds {}", library.entries.size()));
        for (std::size_t i = 0; i < context.size(); ++i)
        {
            auto const& msg = context[i];
            auto const has_method = msg.text().find(*library.entries[i].method) != std::string::npos;
            t.expect(msg.image_count() == 1, "context message without exactly one image");
            t.expect(has_method == (mode == LibraryMode::images_and_methods), fmt::format("message {} method text", i));
        }
    }
    t.expect(counts["images+methods"] == kLibrarySize, "images+methods count");
    t.expect(counts["images"] == kLibrarySize, "images count");
    t.expect(counts["none"] == 0, "none count");
    return t.outcome(fmt::format("images+methods {}, images {} (no method text), none {}", counts["images+methods"],
                                 counts["images"], counts["none"]));
}

Outcome deterministic_replay()
{
    auto t = Tally {};
    for (auto const name: { "hare-and-turtle", "three-circles" })
    {
        auto const dir = source(fmt::format("scenarios/golden/{}", name));
        auto const transcript = transcript_from_json(json::parse(slurp(dir / "transcript.json")));
        auto const first = export_svg(replay(transcript));
        t.expect(first == slurp(dir / "drawing.svg"), fmt::format("{} SVG differs from golden", name));
        t.expect(first == export_svg(replay(transcript)), fmt::format("{} replay not repeatable", name));
        t.expect(export_pen_program(replay(transcript)) == slurp(dir / "drawing.pen"), fmt::format("{} pen program differs", name));
    }

    auto const circles = source("scenarios/golden/three-circles/transcript.json");
    auto sink = std::ostringstream {};
    t.expect(cli::cmd_verify(circles, source("scenarios/three-circles.verify"), sink, sink) == cli::exit_pass, "cmd_verify failed");
    auto const canvas = cli::load_canvas(circles);
    auto const results = cli::verify(canvas, fmt::format("collinear e1 e2 e3 tol={}\nincreasing-radius e1 e2 e3\n", kVerifyTolerancePx));
    for (auto const& r: results)
        t.expect(r.passed, fmt::format("{}: {}", r.text, r.reason));
    return t.outcome(fmt::format("both transcripts replay to the golden SVG; collinear ({}) and increasing-radius hold",
                                 results.at(0).reason));
}

Outcome perception()
{
    auto t = Tally {};
    auto fx = oracle::Fixtures(2024);
    auto jittered = [&](double w, double h) {
        auto const j = [&](double s) { return fx.uniform(-0.2, 0.2) * s; };
        auto const ox = fx.uniform(-500, 500);
        auto const oy = fx.uniform(-500, 500);
        return std::array<Point, 4> { Point { ox + j(w), oy + j(h) }, Point { ox + w + j(w), oy + j(h) },
                                      Point { ox + w + j(w), oy + h + j(h) }, Point { ox + j(w), oy + h + j(h) } };
    };
    auto worst = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
        auto const src = jittered(fx.uniform(200, 1500), fx.uniform(200, 1200));
        auto const dst = jittered(fx.uniform(200, 1500), fx.uniform(200, 1200));
        auto const h = solve_homography(src, dst);
        auto const inv = h.inverse();
        for (std::size_t k = 0; k < 4; ++k)
        {
            worst = std::max(worst, distance(h.apply(src[k]), dst[k]));
            worst = std::max(worst, distance(inv.apply(h.apply(src[k])), src[k]));
        }
    }
    t.expect(worst <= kHomographyResidual, fmt::format("homography residual {}", worst));

    // checkerboard through a perspective map and back; compared on cell interiors
    constexpr int w = 320, hgt = 240, cell = 40, edge = 2;
    auto board = GrayImage(w, hgt);
    for (int y = 0; y < hgt; ++y)
        for (int x = 0; x < w; ++x)
            board.at(x, y) = ((x / cell + y / cell) % 2) ? 230 : 25;
    auto const src = std::array<Point, 4> { Point { 0, 0 }, Point { w, 0 }, Point { w, hgt }, Point { 0, hgt } };
    auto const dst = std::array<Point, 4> { Point { 30, 20 }, Point { 370, 45 }, Point { 350, 300 }, Point { 15, 270 } };
    auto const h = solve_homography(src, dst);
    auto const back = warp(warp(board, h, 400, 320), h.inverse(), w, hgt);
    auto interior = 0, interior_ok = 0, all = 0, all_ok = 0;
    for (int y = edge; y < hgt - edge; ++y)
        for (int x = edge; x < w - edge; ++x)
        {
            auto const ok = std::abs(back.at(x, y) - board.at(x, y)) <= kCheckerboardIntensity;
            ++all;
            all_ok += ok;
            if (std::min(x % cell, cell - 1 - x % cell) < edge || std::min(y % cell, cell - 1 - y % cell) < edge)
                continue;
            ++interior;
            interior_ok += ok;
        }
    auto const fraction = static_cast<double>(interior_ok) / interior;
    t.expect(fraction >= kCheckerboardFraction, fmt::format("checkerboard interiors {:.4f}", fraction));

    // CLAHE tile mappings: monotone, slope bounded by the clipped bin
    for (int i = 0; i < 300; ++i)
    {
        auto const n = fx.integer(2, 400);
        auto const lo = fx.integer(0, 200);
        auto const hi = fx.integer(lo + 1, 255);
        auto tile = std::vector<std::uint8_t>(static_cast<std::size_t>(n));
        for (auto& v: tile)
            v = static_cast<std::uint8_t>(fx.integer(lo, hi));
        auto const clip = fx.uniform(0.5, 8.0);
        auto const lut = clahe_tile_mapping(tile, clip);
        auto hist = std::array<double, 256> {};
        for (auto v: tile)
            hist[v] += 1;
        auto const ceiling = clip * n / 256.0;
        auto excess = 0.0;
        for (auto c: hist)
            excess += std::max(0.0, c - ceiling);
        for (std::size_t v = 1; v < 256; ++v)
        {
            t.expect(lut[v] >= lut[v - 1], "mapping not monotone");
            t.expect(lut[v] - lut[v - 1] <= 255.0 * (std::min(hist[v], ceiling) + excess / 256.0) / n + 1.0, "slope above the clip ceiling");
        }
    }
    // unclipped CLAHE against plain adaptive equalisation on 16x16 images
    auto mismatched = 0;
    for (int i = 0; i < 30; ++i)
    {
        auto img = GrayImage(16, 16);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                img.at(x, y) = static_cast<std::uint8_t>(fx.integer(0, 255));
        for (auto tiles: { 2, 4, 8 })
            mismatched += !(clahe(img, { tiles, tiles, std::numeric_limits<double>::infinity() }) == oracle::ahe_unclipped(img, tiles, tiles));
    }
    t.expect(mismatched == 0, fmt::format("{} unclipped images differ from the oracle", mismatched));
    return t.outcome(fmt::format("homography residual {:.1e} px; checkerboard {:.4f} of cell interiors within +-{} ({:.4f} of all pixels); "
                                 "CLAHE mappings bounded, unclipped equals the oracle",
                                 worst, fraction, kCheckerboardIntensity, static_cast<double>(all_ok) / all));
}

// ---- service -------------------------------------------------------------

class SlowScript final: public Backend
{
  public:
    SlowScript(std::uint64_t seed): _rng(seed)
    {
        auto steps = std::vector<ScriptedBackend::Step> {};
        for (int i = 0; i < 400; ++i)
        {
            if (i % 9 == 4)
            {
                steps.emplace_back(ScriptedBackend::Failure { ErrorCode::Timeout, "slow" });
                continue;
            }
            auto reply = AgentReply { fmt::format("reply {}", i), {} };
            for (int k = 0; k < i % 3; ++k)
                reply.tool_calls.push_back(ToolCall {
                    {}, "draw-circles",
                    { { "circles", { { { "center", { uni(60, 1140), uni(60, 840) } }, { "radius", uni(36, 120) } } } } },
                    {} });
            steps.emplace_back(std::move(reply));
        }
        _inner = std::make_unique<ScriptedBackend>(std::move(steps));
    }

    AgentReply generate(std::span<const Message> history, const json& tools) override
    {
        std::this_thread::sleep_for(std::chrono::microseconds(static_cast<int>(uni(200, 2000))));
        return _inner->generate(history, tools);
    }

  private:
    double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(_rng); }

    std::mt19937_64 _rng;
    std::unique_ptr<ScriptedBackend> _inner;
};

/// Event grammar per session; returns the number of completed turns or -1.
int turns_in(const std::vector<json>& events)
{
    auto in_turn = false;
    auto turns = 0;
    auto expect_seq = events.empty() ? 0 : events.front()["seq"].get<std::uint64_t>();
    for (auto const& e: events)
    {
        if (e["seq"].get<std::uint64_t>() != expect_seq++)
            return -1;
        auto const type = e["type"].get<std::string>();
        if (type == "turn_started")
        {
            if (in_turn)
                return -1;
            in_turn = true;
        }
        else if (type == "turn_ended")
        {
            if (!in_turn)
                return -1;
            in_turn = false;
            ++turns;
        }
        else if (type == "agent_text" || type == "tool_call" || type == "error")
        {
            if (!in_turn)
                return -1;
        }
        else if (in_turn)
            return -1;
    }
    return in_turn ? -1 : turns;
}

Outcome service_contract()
{
    auto t = Tally {};
    auto const dir = scratch("service");
    auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
    auto config = ServiceConfig {};
    config.data_dir = dir;
    config.default_backend = "fuzz";
    config.backend_factory = [counter](const std::string&) -> std::unique_ptr<Backend> { return std::make_unique<SlowScript>((*counter)++); };

    auto ids = std::vector<std::string> {};
    auto canvases = std::vector<CanvasState> {};
    auto rejected = std::atomic<int> { 0 };
    auto total_turns = 0;
    {
        auto svc = SessionService(config);
        auto logs = std::vector<std::vector<json>>(3);
        auto log_mutex = std::mutex {};
        for (std::size_t s = 0; s < 3; ++s)
        {
            ids.push_back(svc.create_session({ LibraryMode::none, s, {} }));
            svc.subscribe(ids[s], [&, s](const json& e) {
                auto lock = std::lock_guard(log_mutex);
                logs[s].push_back(e);
            });
        }
        auto workers = std::vector<std::thread> {};
        for (int w = 0; w < 8; ++w)
            workers.emplace_back([&, w] {
                auto rng = std::mt19937(static_cast<unsigned>(w));
                auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
                for (int i = 0; i < 60; ++i)
                {
                    auto const& id = ids[static_cast<std::size_t>(pick(3))];
                    try
                    {
                        switch (pick(4))
                        {
                            case 0:
                            case 1: svc.post_message(id, "go on"); break;
                            case 2:
                            {
                                auto const x = 40.0 + pick(1000);
                                auto const y = 40.0 + pick(800);
                                svc.post_strokes(id, { Polyline({ { x, y }, { x + 60, y + 5 } }) });
                                break;
                            }
                            default: svc.signal(id, Signal {}); break;
                        }
                    }
                    catch (const Error& e)
                    {
                        if (e.code() == ErrorCode::TurnInProgress)
                            ++rejected;
                    }
                }
            });
        for (auto& w: workers)
            w.join();
        for (std::size_t s = 0; s < 3; ++s)
        {
            auto const turns = turns_in(logs[s]);
            t.expect(turns >= 0, fmt::format("{}: event grammar violated", ids[s]));
            total_turns += std::max(turns, 0);
            canvases.push_back(svc.canvas(ids[s]));
        }
        t.expect(rejected > 0, "no TurnInProgress under concurrency");

        // a held turn blocks every other mutation of its session
        struct Gate
        {
            std::mutex m;
            std::condition_variable cv;
            bool entered = false, released = false;
        };
        struct Held final: Backend
        {
            std::shared_ptr<Gate> gate;
            AgentReply generate(std::span<const Message>, const json&) override
            {
                auto lock = std::unique_lock(gate->m);
                gate->entered = true;
                gate->cv.notify_all();
                gate->cv.wait(lock, [&] { return gate->released; });
                return AgentReply { "done", {} };
            }
        };
        auto gate = std::make_shared<Gate>();
        auto held_config = config;
        held_config.data_dir = dir / "held";
        held_config.backend_factory = [gate](const std::string&) {
            auto b = std::make_unique<Held>();
            b->gate = gate;
            return b;
        };
        auto held = SessionService(held_config);
        auto const id = held.create_session();
        auto turn = std::async(std::launch::async, [&] { return held.post_message(id, "hold"); });
        {
            auto lock = std::unique_lock(gate->m);
            gate->cv.wait(lock, [&] { return gate->entered; });
        }
        auto blocked = 0;
        for (auto const& attempt: std::vector<std::function<void()>> {
                 [&] { held.post_message(id, "again"); },
                 [&] { held.post_strokes(id, { Polyline({ { 100, 100 }, { 200, 100 } }) }); },
                 [&] { held.signal(id, Signal {}); },
             })
            try
            {
                attempt();
            }
            catch (const Error& e)
            {
                blocked += e.code() == ErrorCode::TurnInProgress;
            }
        {
            auto lock = std::lock_guard(gate->m);
            gate->released = true;
        }
        gate->cv.notify_all();
        turn.get();
        t.expect(blocked == 3, fmt::format("{} of 3 interruptions refused", blocked));
    }

    // restart on the same directory: every stored snapshot equals a replay of the transcript
    auto snapshots = std::size_t { 0 };
    auto restored = SessionService(config);
    t.expect(restored.list_sessions() == ids, "restored session list");
    for (std::size_t s = 0; s < ids.size(); ++s)
    {
        t.expect(restored.canvas(ids[s]) == canvases[s], fmt::format("{} restored canvas", ids[s]));
        auto const transcript = transcript_from_json(json::parse(slurp(dir / ids[s] / "transcript.json")));
        auto const final = replay(transcript, [&](const CanvasState& c) {
            ++snapshots;
            t.expect(slurp(dir / ids[s] / "snapshots" / fmt::format("{:03}.svg", c.revision)) == export_svg(c),
                     fmt::format("{} snapshot {}", ids[s], c.revision));
        });
        t.expect(final == canvases[s], fmt::format("{} replay differs from the live canvas", ids[s]));
    }
    fs::remove_all(dir);
    return t.outcome(fmt::format("{} turns ordered under 8 concurrent clients, {} TurnInProgress refusals, {} snapshots replayed",
                                 total_turns, rejected.load(), snapshots));
}

struct Criterion
{
    const char* name;
    double budget_seconds; ///< 0: no runtime bound
    Outcome (*run)();
};

} // namespace

int main()
{
    auto const criteria = std::vector<Criterion> {
        { "constraint-fidelity", 1.0, constraint_fidelity },
        { "hatching-oracle", 5.0, hatching_oracle },
        { "scribble-containment", 10.0, scribble_containment },
        { "spline-interpolation", 0.0, splines_and_circles },
        { "instruction-template", 0.0, instruction_template },
        { "icl-assembly", 0.0, icl_assembly },
        { "deterministic-replay", 0.0, deterministic_replay },
        { "perception", 10.0, perception },
        { "service-contract", 0.0, service_contract },
    };

    auto const suite_start = Clock::now();
    auto failed = 0;
    for (auto const& c: criteria)
    {
        auto const start = Clock::now();
        auto outcome = Outcome {};
        try
        {
            outcome = c.run();
        }
        catch (const std::exception& e)
        {
            outcome = { false, fmt::format("threw: {}", e.what()) };
        }
        auto const seconds = std::chrono::duration<double>(Clock::now() - start).count();
        auto budget = std::string {};
        if (c.budget_seconds > 0)
        {
            budget = fmt::format(" / {:.0f} s", c.budget_seconds);
            if (seconds >= c.budget_seconds)
            {
                outcome.passed = false;
                outcome.detail += "; over the time budget";
            }
        }
        if (c.name == std::string_view("service-contract"))
        {
            auto const total = std::chrono::duration<double>(Clock::now() - suite_start).count();
            budget = fmt::format(", suite {:.2f} s / {:.0f} s", total, kSuiteBudgetSeconds);
            if (total >= kSuiteBudgetSeconds)
            {
                outcome.passed = false;
                outcome.detail += "; suite over its time budget";
            }
        }
        failed += !outcome.passed;
        fmt::print("{} {:<22} {:7.3f} s{}  {}\n", outcome.passed ? "PASS" : "FAIL", c.name, seconds, budget, outcome.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
