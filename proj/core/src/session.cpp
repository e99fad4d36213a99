// SPDX-License-Identifier: Apache-2.0
#include <companion/dispatch.hpp>
#include <companion/error.hpp>
#include <companion/image.hpp>
#include <companion/random.hpp>
#include <companion/session.hpp>
#include <companion/tool_schema.hpp>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>

namespace companion
{

namespace
{

using json = nlohmann::json;

std::string_view to_string(TurnKind kind)
{
    return kind == TurnKind::human_strokes ? "human_strokes" : "message";
}

TurnKind turn_kind_from_string(std::string_view text)
{
    if (text == "human_strokes")
        return TurnKind::human_strokes;
    if (text == "message")
        return TurnKind::message;
    throw Error(ErrorCode::InvalidDocument, fmt::format("unknown turn kind '{}'", text));
}

json strokes_to_json(const std::vector<Polyline>& strokes)
{
    auto out = json::array();
    for (auto const& s: strokes)
        out.push_back(stroke_to_json(s));
    return out;
}

std::vector<Polyline> strokes_from_json(const json& doc)
{
    auto out = std::vector<Polyline> {};
    for (auto const& s: doc)
        out.push_back(stroke_from_json(s));
    return out;
}

// Replays one recorded reply; used to rebuild a session from its transcript.
class RecordedBackend final: public Backend
{
  public:
    explicit RecordedBackend(const AgentReply& reply): _reply(reply) {}

    AgentReply generate(std::span<const Message>, const json&) override { return _reply; }

  private:
    const AgentReply& _reply;
};

CanvasState add_human_element(const CanvasState& canvas, const std::vector<Polyline>& strokes)
{
    return add_element(canvas, Element::make({}, Author::human, strokes, "human"), AddPolicy::clip_then_accept);
}

} // namespace

json to_json(const TurnRecord& r)
{
    auto executed = json::array();
    for (auto const& e: r.executed)
        executed.push_back(
            { { "call_index", e.call_index }, { "element_id", e.element_id }, { "polylines", strokes_to_json(e.polylines) } });
    auto failures = json::array();
    for (auto const& f: r.failures)
        failures.push_back({ { "call_index", f.call_index },
                             { "name", f.name },
                             { "code", to_string(f.code) },
                             { "message", f.message },
                             { "detail", f.detail } });
    return {
        { "index", r.index },
        { "kind", to_string(r.kind) },
        { "text", r.text },
        { "image_ref", r.image_ref },
        { "strokes", strokes_to_json(r.strokes) },
        { "strokes_element", r.strokes_element },
        { "reply", to_json(r.reply) },
        { "executed", std::move(executed) },
        { "failures", std::move(failures) },
        { "revision_before", r.revision_before },
        { "revision_after", r.revision_after },
    };
}

TurnRecord turn_record_from_json(const json& doc)
{
    try
    {
        auto r = TurnRecord {};
        r.index = doc.at("index").get<std::size_t>();
        r.kind = turn_kind_from_string(doc.at("kind").get<std::string>());
        r.text = doc.value("text", std::string {});
        r.image_ref = doc.value("image_ref", std::string {});
        r.strokes = strokes_from_json(doc.value("strokes", json::array()));
        r.strokes_element = doc.value("strokes_element", std::string {});
        if (doc.contains("reply"))
            r.reply = reply_from_json(doc["reply"]);
        for (auto const& e: doc.value("executed", json::array()))
            r.executed.push_back({ e.at("call_index").get<std::size_t>(),
                                   e.at("element_id").get<std::string>(),
                                   strokes_from_json(e.value("polylines", json::array())) });
        for (auto const& f: doc.value("failures", json::array()))
        {
            auto const code = error_code_from_string(f.at("code").get<std::string>());
            if (!code)
                throw Error(ErrorCode::InvalidDocument, "unknown failure code");
            r.failures.push_back({ f.at("call_index").get<std::size_t>(),
                                   f.value("name", std::string {}),
                                   *code,
                                   f.value("message", std::string {}),
                                   f.value("detail", json {}) });
        }
        r.revision_before = doc.value("revision_before", std::uint64_t { 0 });
        r.revision_after = doc.value("revision_after", std::uint64_t { 0 });
        return r;
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::InvalidDocument, fmt::format("turn record: {}", e.what()));
    }
}

json to_json(const SessionTranscript& t)
{
    auto turns = json::array();
    for (auto const& r: t.turns)
        turns.push_back(to_json(r));
    return {
        { "id", t.id },
        { "created_at", t.created_at },
        { "seed", t.seed },
        { "params", to_json(t.params) },
        { "library_mode", to_string(t.mode) },
        { "turns", std::move(turns) },
    };
}

SessionTranscript transcript_from_json(const json& doc)
{
    if (!doc.is_object())
        throw Error(ErrorCode::InvalidDocument, "transcript must be an object");
    try
    {
        auto t = SessionTranscript {};
        t.id = doc.value("id", std::string {});
        t.created_at = doc.value("created_at", std::string {});
        t.seed = doc.value("seed", std::uint64_t { 0 });
        t.params = instruction_params_from_json(doc.value("params", json::object()));
        t.mode = library_mode_from_string(doc.value("library_mode", std::string { "none" }));
        for (auto const& r: doc.value("turns", json::array()))
            t.turns.push_back(turn_record_from_json(r));
        return t;
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::InvalidDocument, fmt::format("transcript: {}", e.what()));
    }
}

std::string timestamp_utc()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (auto const* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch)
    {
        try
        {
            now = static_cast<std::time_t>(std::stoll(epoch));
        }
        catch (const std::exception&)
        {
        }
    }
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

std::string tool_result_text(const ExecutedCall* executed, const CallFailure* failure)
{
    if (executed)
    {
        auto bbox = BBox::around(executed->polylines.front().front());
        for (auto const& p: executed->polylines)
            bbox.expand(p.bbox());
        return json { { "status", "ok" },
                      { "element", executed->element_id },
                      { "polylines", executed->polylines.size() },
                      { "bbox", { bbox.min_x, bbox.min_y, bbox.max_x, bbox.max_y } } }
            .dump();
    }
    if (failure)
    {
        auto doc = json { { "status", "error" }, { "code", to_string(failure->code) }, { "message", failure->message } };
        if (!failure->detail.is_null())
            doc["detail"] = failure->detail;
        return doc.dump();
    }
    return R"({"status":"skipped"})";
}

Session::Session(SessionTranscript header, std::vector<Message> context): _transcript(std::move(header))
{
    _transcript.turns.clear();
    _instructions = render_system_instructions(_transcript.params);
    _canvas.constraints = _transcript.params.constraints();
    auto system = Message {};
    system.role = Role::system;
    system.parts.push_back(Part::of_text(_instructions));
    _history.push_back(std::move(system));
    for (auto& m: context)
        _history.push_back(std::move(m));
}

void Session::apply_human_strokes(CanvasState& canvas, TurnRecord& record, std::vector<Polyline> strokes) const
{
    canvas = add_human_element(canvas, strokes);
    record.strokes = std::move(strokes);
    record.strokes_element = canvas.elements.back().id;
}

const TurnRecord& Session::add_human_strokes(std::vector<Polyline> strokes)
{
    if (strokes.empty())
        throw Error(ErrorCode::EmptyStrokes, "no strokes to add");
    auto canvas = _canvas;
    auto record = TurnRecord {};
    record.index = _transcript.turns.size();
    record.kind = TurnKind::human_strokes;
    record.revision_before = canvas.revision;
    apply_human_strokes(canvas, record, std::move(strokes));
    record.revision_after = canvas.revision;

    _canvas = std::move(canvas);
    _transcript.turns.push_back(std::move(record));
    return _transcript.turns.back();
}

const TurnRecord& Session::run_turn(const HumanInput& input, Backend& backend, const TurnObserver& observer)
{
    auto canvas = _canvas;
    auto history = _history;
    auto record = TurnRecord {};
    record.index = _transcript.turns.size();
    record.kind = TurnKind::message;
    record.text = input.text.value_or(std::string {});
    record.revision_before = canvas.revision;

    if (!input.strokes.empty())
        apply_human_strokes(canvas, record, input.strokes);

    auto user = Message {};
    user.role = Role::user;
    if (input.image && !input.image->empty())
    {
        user.parts.push_back(Part::of_image(*input.image));
    }
    else
    {
        auto name = fmt::format("canvas-r{}.png", canvas.revision);
        user.parts.push_back(Part::of_image(ImageRef { std::move(name), "image/png", encode_png(rasterize(canvas)) }));
    }
    record.image_ref = user.parts.front().image.name;
    if (!record.text.empty())
        user.parts.push_back(Part::of_text(record.text));
    history.push_back(std::move(user));

    auto reply = backend.generate(history, tool_schema());
    if (reply.empty())
        throw Error(ErrorCode::BackendError, "backend returned an empty reply");
    for (std::size_t k = 0; k < reply.tool_calls.size(); ++k)
    {
        auto& call = reply.tool_calls[k];
        if (call.id.empty())
            call.id = fmt::format("call-{}-{}", record.index, k);
        if (!call.seed)
            call.seed = derive_call_seed(_transcript.seed, record.index, k);
    }

    auto model = Message {};
    model.role = Role::model;
    if (!reply.text.empty())
        model.parts.push_back(Part::of_text(reply.text));
    model.tool_calls = reply.tool_calls;
    history.push_back(std::move(model));
    if (!reply.text.empty() && observer.on_agent_text)
        observer.on_agent_text(reply.text);

    for (std::size_t k = 0; k < reply.tool_calls.size(); ++k)
    {
        auto const& call = reply.tool_calls[k];
        auto failure = std::optional<CallFailure> {};
        try
        {
            auto result = dispatch_tool_call(call, canvas);
            canvas = std::move(result.canvas);
            record.executed.push_back({ k, std::move(result.element_id), std::move(result.polylines) });
        }
        catch (const Error& e)
        {
            failure = CallFailure { k, call.name, e.code(), e.what(), e.detail() };
        }
        catch (const json::exception& e)
        {
            failure = CallFailure { k, call.name, ErrorCode::ArgSchemaMismatch, e.what(), nullptr };
        }

        auto const* executed = failure ? nullptr : &record.executed.back();
        if (failure)
            record.failures.push_back(*failure);
        auto const* failed = failure ? &record.failures.back() : nullptr;

        auto result = Message {};
        result.role = Role::tool;
        result.tool_call_id = call.id;
        result.parts.push_back(Part::of_text(tool_result_text(executed, failed)));
        history.push_back(std::move(result));
        if (observer.on_tool_call)
            observer.on_tool_call(call, executed, failed);
    }

    record.reply = std::move(reply);
    record.revision_after = canvas.revision;

    _canvas = std::move(canvas);
    _history = std::move(history);
    _transcript.turns.push_back(std::move(record));
    return _transcript.turns.back();
}

Session Session::restore(const SessionTranscript& transcript, std::vector<Message> context)
{
    auto session = Session(transcript, std::move(context));
    for (auto const& turn: transcript.turns)
    {
        if (turn.kind == TurnKind::human_strokes)
        {
            session.add_human_strokes(turn.strokes);
        }
        else
        {
            auto input = HumanInput {};
            if (!turn.text.empty())
                input.text = turn.text;
            input.strokes = turn.strokes;
            auto backend = RecordedBackend(turn.reply);
            session.run_turn(input, backend);
        }
        auto const& rebuilt = session.transcript().turns.back();
        if (rebuilt.revision_after != turn.revision_after || rebuilt.executed != turn.executed)
            throw Error(ErrorCode::InvalidDocument,
                        fmt::format("turn {} does not reproduce its recorded result", turn.index));
    }
    return session;
}

const TurnRecord& run_turn(Session& session, const HumanInput& input, Backend& backend, const TurnObserver& observer)
{
    return session.run_turn(input, backend, observer);
}

CanvasState replay(const SessionTranscript& transcript, const std::function<void(const CanvasState&)>& on_revision)
{
    auto canvas = CanvasState {};
    canvas.constraints = transcript.params.constraints();
    auto const notify = [&] {
        if (on_revision)
            on_revision(canvas);
    };
    notify();
    for (auto const& turn: transcript.turns)
    {
        if (!turn.strokes.empty())
        {
            canvas = add_human_element(canvas, turn.strokes);
            notify();
        }
        for (auto const& call: turn.reply.tool_calls)
        {
            try
            {
                canvas = dispatch_tool_call(call, canvas).canvas;
                notify();
            }
            catch (const Error&)
            {
                // recorded as a failure when the turn ran; nothing to apply
            }
            catch (const json::exception&)
            {
            }
        }
    }
    return canvas;
}

} // namespace companion
