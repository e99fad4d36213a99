// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "verify.hpp"

#include <companion/backend.hpp>
#include <companion/error.hpp>
#include <companion/export.hpp>
#include <companion/image.hpp>
#include <companion/perception.hpp>
#include <companion/tool_schema.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

namespace companion::cli
{

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_text_file(const fs::path& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path.string()));
    return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

void write_text_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    auto out = std::ofstream(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
        throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
}

namespace
{

std::string lower(std::string text)
{
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    return text;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to)
{
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size()))
        text.replace(pos, from.size(), to);
    return text;
}

LiveBackendConfig live_config(const std::optional<std::string>& model)
{
    auto config = LiveBackendConfig::from_env();
    if (model)
        config.model = *model;
    return config;
}

json read_json_file(const fs::path& path)
{
    try
    {
        return json::parse(read_text_file(path));
    }
    catch (const json::parse_error& e)
    {
        throw Error(ErrorCode::InvalidDocument, fmt::format("{}: {}", path.string(), e.what()));
    }
}

void report(std::ostream& err, const Error& e)
{
    fmt::print(err, "error: {}: {}\n", to_string(e.code()), e.what());
}

} // namespace

bool signals_completion(const AgentReply& reply, const std::string& phrase)
{
    if (!reply.tool_calls.empty())
        return false;
    return lower(reply.text).find(lower(phrase)) != std::string::npos;
}

IllustrateResult illustrate(const IllustrateOptions& options, std::ostream& log)
{
    auto context = std::vector<Message> {};
    if (options.mode != LibraryMode::none)
    {
        if (!options.library)
            throw Error(ErrorCode::BadConfig, fmt::format("library mode '{}' needs --library", to_string(options.mode)));
        context = assemble_context(load_library(*options.library, options.mode));
    }

    auto header = SessionTranscript {};
    header.id = "cli";
    header.created_at = timestamp_utc();
    header.seed = options.seed;
    header.mode = options.mode;
    auto session = Session(std::move(header), std::move(context));

    auto result = IllustrateResult {};
    result.stop = StopReason::cap_reached;
    if (options.max_turns > 0)
    {
        auto backend = make_backend(options.backend, live_config(options.model));
        for (int turn = 0; turn < options.max_turns; ++turn)
        {
            auto input = HumanInput {};
            input.text = turn == 0 ? options.prompt : options.continue_prompt;
            try
            {
                auto const& record = run_turn(session, input, *backend);
                fmt::print(log, "turn {}: {} call(s), {} failed, revision {}\n", turn + 1,
                           record.reply.tool_calls.size(), record.failures.size(), record.revision_after);
                if (signals_completion(record.reply, options.completion_phrase))
                {
                    result.stop = StopReason::completed;
                    break;
                }
            }
            catch (const Error& e)
            {
                if (e.code() != ErrorCode::BackendError && e.code() != ErrorCode::Timeout)
                    throw;
                result.stop = StopReason::backend_failed;
                result.error = fmt::format("{}: {}", to_string(e.code()), e.what());
                break;
            }
        }
    }
    result.transcript = session.transcript();
    result.canvas = session.canvas();
    return result;
}

void write_artifacts(const fs::path& dir, const SessionTranscript& transcript, const CanvasState& canvas)
{
    fs::create_directories(dir);
    write_text_file(dir / "drawing.svg", export_svg(canvas));
    write_text_file(dir / "drawing.pen", export_pen_program(canvas));
    write_text_file(dir / "canvas.json", to_json(canvas).dump(2) + "\n");
    write_text_file(dir / "transcript.json", to_json(transcript).dump(2) + "\n");
}

int cmd_illustrate(const IllustrateOptions& options, std::ostream& out, std::ostream& err)
{
    try
    {
        auto const result = illustrate(options, err);
        write_artifacts(options.out, result.transcript, result.canvas);
        switch (result.stop)
        {
        case StopReason::completed:
            fmt::print(out, "completed after {} turn(s); {} element(s) in {}\n", result.transcript.turns.size(),
                       result.canvas.elements.size(), options.out.string());
            return exit_pass;
        case StopReason::cap_reached:
            fmt::print(err, "warning: turn cap {} reached before completion\n", options.max_turns);
            fmt::print(out, "stopped after {} turn(s); {} element(s) in {}\n", result.transcript.turns.size(),
                       result.canvas.elements.size(), options.out.string());
            return exit_pass;
        case StopReason::backend_failed:
            fmt::print(err, "error: {}\n", result.error);
            return exit_failure;
        }
    }
    catch (const Error& e)
    {
        report(err, e);
        return e.code() == ErrorCode::BadConfig ? exit_usage : exit_failure;
    }
    return exit_failure;
}

std::string mode_slug(LibraryMode mode)
{
    switch (mode)
    {
    case LibraryMode::none: return "none";
    case LibraryMode::images_only: return "images";
    case LibraryMode::images_and_methods: return "images-methods";
    }
    return "none";
}

std::string subject_slug(const std::string& subject)
{
    auto slug = std::string {};
    for (unsigned char c: subject)
    {
        if (std::isalnum(c))
            slug += static_cast<char>(std::tolower(c));
        else if (!slug.empty() && slug.back() != '-')
            slug += '-';
    }
    while (!slug.empty() && slug.back() == '-')
        slug.pop_back();
    return slug.empty() ? "subject" : slug;
}

namespace
{

std::string html_escape(const std::string& text)
{
    auto out = std::string {};
    for (char c: text)
    {
        switch (c)
        {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

int cmd_ablation(const AblationOptions& options, std::ostream& out, std::ostream& err)
{
    if (options.subjects.empty())
    {
        fmt::print(err, "error: no subjects given\n");
        return exit_usage;
    }
    constexpr LibraryMode modes[] = { LibraryMode::none, LibraryMode::images_only, LibraryMode::images_and_methods };

    auto sheet = std::ostringstream {};
    sheet << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Vocabulary ablation</title>\n"
          << "<style>table{border-collapse:collapse}td,th{border:1px solid #999;padding:4px}"
             "img{width:360px}</style>\n</head>\n<body>\n<table>\n<tr><th>subject</th>";
    for (auto mode: modes)
        sheet << "<th>" << html_escape(std::string(to_string(mode))) << "</th>";
    sheet << "</tr>\n";

    auto status = int { exit_pass };
    for (auto const& subject: options.subjects)
    {
        auto const slug = subject_slug(subject);
        sheet << "<tr><td>" << html_escape(subject) << "</td>";
        for (auto mode: modes)
        {
            auto run = IllustrateOptions {};
            run.prompt = replace_all(options.prompt_template, "{subject}", subject);
            run.backend = replace_all(replace_all(options.backend, "{subject}", slug), "{mode}", mode_slug(mode));
            run.model = options.model;
            run.mode = mode;
            if (mode != LibraryMode::none)
                run.library = options.library;
            run.seed = options.seed;
            run.out = options.out / slug / mode_slug(mode);
            run.max_turns = options.max_turns;
            run.continue_prompt = options.continue_prompt;
            run.completion_phrase = options.completion_phrase;

            fmt::print(err, "{} / {}\n", subject, to_string(mode));
            try
            {
                auto const result = illustrate(run, err);
                write_artifacts(run.out, result.transcript, result.canvas);
                write_text_file(options.out / slug / (mode_slug(mode) + ".svg"), export_svg(result.canvas));
                if (result.stop == StopReason::backend_failed)
                {
                    fmt::print(err, "error: {}\n", result.error);
                    status = exit_failure;
                }
            }
            catch (const Error& e)
            {
                report(err, e);
                if (e.code() == ErrorCode::BadConfig)
                    return exit_usage;
                status = exit_failure;
            }
            auto const src = fmt::format("{}/{}.svg", slug, mode_slug(mode));
            sheet << "<td><img src=\"" << html_escape(src) << "\" alt=\"" << html_escape(subject) << ", "
                  << html_escape(std::string(to_string(mode))) << "\"></td>";
        }
        sheet << "</tr>\n";
    }
    sheet << "</table>\n</body>\n</html>\n";
    write_text_file(options.out / "index.html", sheet.str());
    fmt::print(out, "{} subject(s), {} drawing(s), sheet {}\n", options.subjects.size(), options.subjects.size() * 3,
               (options.out / "index.html").string());
    return status;
}

CanvasState load_canvas(const fs::path& path)
{
    auto const doc = read_json_file(path);
    if (doc.is_object() && doc.contains("turns"))
        return replay(transcript_from_json(doc));
    return canvas_from_json(doc);
}

int cmd_verify(const fs::path& canvas_path, const fs::path& script_path, std::ostream& out, std::ostream& err)
{
    try
    {
        auto const canvas = load_canvas(canvas_path);
        auto const results = verify(canvas, read_text_file(script_path));
        auto failed = std::size_t { 0 };
        for (auto const& r: results)
        {
            failed += r.passed ? 0 : 1;
            if (r.reason.empty())
                fmt::print(out, "{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.line, r.text);
            else
                fmt::print(out, "{} {}: {} ({})\n", r.passed ? "PASS" : "FAIL", r.line, r.text, r.reason);
        }
        fmt::print(out, "{} assertion(s), {} failed\n", results.size(), failed);
        return failed == 0 ? exit_pass : exit_failure;
    }
    catch (const Error& e)
    {
        report(err, e);
        return e.code() == ErrorCode::UnknownAssertion ? exit_usage : exit_failure;
    }
}

int cmd_replay(const ReplayOptions& options, std::ostream& out, std::ostream& err)
{
    try
    {
        auto const transcript = transcript_from_json(read_json_file(options.transcript));
        auto const canvas = replay(transcript);
        auto const svg = export_svg(canvas);
        if (options.out)
            write_artifacts(*options.out, transcript, canvas);
        if (options.check)
        {
            if (read_text_file(*options.check) != svg)
            {
                fmt::print(out, "MISMATCH: replayed SVG differs from {}\n", options.check->string());
                return exit_failure;
            }
            fmt::print(out, "MATCH: {} element(s), revision {}\n", canvas.elements.size(), canvas.revision);
            return exit_pass;
        }
        if (!options.out)
            out << svg;
        return exit_pass;
    }
    catch (const Error& e)
    {
        report(err, e);
        return exit_failure;
    }
}

int cmd_export(const fs::path& canvas_path,
               const std::string& format,
               const std::optional<fs::path>& output,
               std::ostream& out,
               std::ostream& err)
{
    if (format != "svg" && format != "pen")
    {
        fmt::print(err, "error: unknown export format '{}' (svg, pen)\n", format);
        return exit_usage;
    }
    try
    {
        auto const canvas = load_canvas(canvas_path);
        auto const text = format == "svg" ? export_svg(canvas) : export_pen_program(canvas);
        if (output)
            write_text_file(*output, text);
        else
            out << text;
        return exit_pass;
    }
    catch (const Error& e)
    {
        report(err, e);
        return exit_failure;
    }
}

int cmd_instructions(const std::optional<fs::path>& params_path, std::ostream& out)
{
    auto params = InstructionParams {};
    if (params_path)
        params = instruction_params_from_json(read_json_file(*params_path));
    out << render_system_instructions(params);
    return exit_pass;
}

int cmd_schema(std::ostream& out)
{
    out << tool_schema().dump(2) << '\n';
    return exit_pass;
}

int cmd_rectify(const RectifyOptions& options, std::ostream& out, std::ostream& err)
{
    try
    {
        auto const photo = read_png(options.photo);
        auto const corners = read_corner_file(options.corners);
        auto const page = rectify_page(photo, corners, options.width, options.height,
                                       { options.tiles, options.tiles, options.clip_limit });
        write_png(options.output, page);
        fmt::print(out, "{}x{} -> {}\n", page.width(), page.height(), options.output.string());
        return exit_pass;
    }
    catch (const Error& e)
    {
        report(err, e);
        return exit_failure;
    }
}

int cmd_bootstrap(const BootstrapOptions& options, std::ostream& out, std::ostream& err)
{
    try
    {
        auto doc = read_json_file(options.library);
        if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
            throw Error(ErrorCode::InvalidDocument, "manifest needs an \"entries\" array");
        auto const base = options.library.parent_path();
        auto const out_base = fs::absolute(options.output).parent_path();
        auto backend = make_backend(options.backend, live_config(options.model));

        auto written = std::size_t { 0 };
        for (auto& entry: doc["entries"])
        {
            auto const image_path = base / entry.at("image").get<std::string>();
            entry["image"] = fs::relative(fs::absolute(image_path), out_base).generic_string();
            if (entry.contains("method") && !options.overwrite)
                continue;
            auto image = ImageRef {};
            image.name = image_path.filename().string();
            auto const bytes = read_text_file(image_path);
            image.data.assign(bytes.begin(), bytes.end());
            entry["method"] = bootstrap_method_text(image, *backend, options.prompt);
            ++written;
            fmt::print(err, "{}: method written\n", entry.value("subject", std::string {}));
        }
        write_text_file(options.output, doc.dump(2) + "\n");
        fmt::print(out, "{} method(s) written to {}\n", written, options.output.string());
        return exit_pass;
    }
    catch (const json::exception& e)
    {
        fmt::print(err, "error: InvalidDocument: {}\n", e.what());
        return exit_failure;
    }
    catch (const Error& e)
    {
        report(err, e);
        return e.code() == ErrorCode::BadConfig ? exit_usage : exit_failure;
    }
}

} // namespace companion::cli
