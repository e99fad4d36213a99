// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/export.hpp>
#include <companion/image.hpp>
#include <companion/service.hpp>

#include <fmt/format.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace companion
{

namespace
{

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr std::size_t kEventLogSize = 1024;

std::string read_text(const fs::path& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    auto buffer = std::ostringstream {};
    buffer << in.rdbuf();
    return buffer.str();
}

void write_atomic(const fs::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        auto out = std::ofstream(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::Io, fmt::format("cannot write {}", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    fs::rename(tmp, path);
}

fs::path snapshot_path(const fs::path& dir, std::uint64_t revision)
{
    return dir / "snapshots" / fmt::format("{:03}.svg", revision);
}

json strokes_json(const std::vector<Polyline>& strokes)
{
    auto out = json::array();
    for (auto const& s: strokes)
        out.push_back(stroke_to_json(s));
    return out;
}

std::size_t message_turns(const SessionTranscript& t)
{
    return static_cast<std::size_t>(
        std::count_if(t.turns.begin(), t.turns.end(), [](const TurnRecord& r) { return r.kind == TurnKind::message; }));
}

} // namespace

std::string_view to_string(SignalKind kind)
{
    return kind == SignalKind::request_turn ? "request_turn" : "look_at_drawing";
}

SignalKind signal_kind_from_string(std::string_view text)
{
    if (text == "request_turn")
        return SignalKind::request_turn;
    if (text == "look_at_drawing")
        return SignalKind::look_at_drawing;
    throw Error(ErrorCode::InvalidDocument, fmt::format("unknown signal '{}'", text));
}

ServiceConfig ServiceConfig::from_env()
{
    auto config = ServiceConfig {};
    if (auto const* dir = std::getenv("COMPANION_DATA_DIR"); dir && *dir)
        config.data_dir = dir;
    if (auto const* backend = std::getenv("COMPANION_BACKEND"); backend && *backend)
        config.default_backend = backend;
    if (auto const* manifest = std::getenv("COMPANION_LIBRARY"); manifest && *manifest)
        config.library = load_library(manifest, LibraryMode::images_and_methods);
    return config;
}

struct SessionService::Entry
{
    std::string id;
    fs::path dir;
    std::string backend_spec;

    // Guarded by `mutation`.
    std::mutex mutation;
    std::unique_ptr<Backend> backend;
    std::unique_ptr<Session> session;
    std::map<std::string, StrokesResult> idempotency;
    std::atomic<bool> turn_active { false };

    // Published state; readers copy the pointers and never wait for a turn.
    mutable std::mutex view_mutex;
    std::shared_ptr<const CanvasState> canvas;
    std::shared_ptr<const SessionTranscript> transcript;
    std::optional<ImageRef> pending_image;
    bool human_turn_requested = false;

    mutable std::mutex events_mutex;
    std::uint64_t next_seq = 1;
    std::deque<json> log;
    std::map<std::uint64_t, EventSink> sinks;
    std::uint64_t next_token = 1;
};

SessionService::SessionService(ServiceConfig config): _config(std::move(config))
{
    _config.params.check();
    if (!_config.backend_factory)
        _config.backend_factory = [](const std::string& spec) { return make_backend(spec); };
    fs::create_directories(_config.data_dir);
    load_existing();
}

SessionService::~SessionService() = default;

std::unique_ptr<Backend> SessionService::backend_for(const std::string& spec) const
{
    auto backend = _config.backend_factory(spec);
    if (!backend)
        throw Error(ErrorCode::BadConfig, fmt::format("no backend for '{}'", spec));
    return backend;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const
{
    auto lock = std::shared_lock(_mutex);
    auto it = _sessions.find(id);
    if (it == _sessions.end())
        throw Error(ErrorCode::UnknownSession, fmt::format("no session '{}'", id), { { "id", id } });
    return it->second;
}

void SessionService::publish(Entry& entry)
{
    auto canvas = std::make_shared<const CanvasState>(entry.session->canvas());
    auto transcript = std::make_shared<const SessionTranscript>(entry.session->transcript());
    auto lock = std::lock_guard(entry.view_mutex);
    entry.canvas = std::move(canvas);
    entry.transcript = std::move(transcript);
}

void SessionService::persist(Entry& entry, std::uint64_t from_revision)
{
    auto const& canvas = entry.session->canvas();
    fs::create_directories(entry.dir / "snapshots");
    // Each revision adds exactly one element, so revision r is the first r elements.
    for (auto r = from_revision; r <= canvas.revision; ++r)
    {
        auto view = CanvasState {};
        view.constraints = canvas.constraints;
        view.elements.assign(canvas.elements.begin(), canvas.elements.begin() + static_cast<std::ptrdiff_t>(r));
        view.revision = r;
        write_atomic(snapshot_path(entry.dir, r), export_svg(view));
    }
    write_atomic(entry.dir / "transcript.json", to_json(entry.session->transcript()).dump(1));
}

void SessionService::emit(Entry& entry, json event)
{
    auto lock = std::lock_guard(entry.events_mutex);
    event["session"] = entry.id;
    event["seq"] = entry.next_seq++;
    entry.log.push_back(event);
    if (entry.log.size() > kEventLogSize)
        entry.log.pop_front();
    for (auto const& [token, sink]: entry.sinks)
        sink(event);
}

void SessionService::load_existing()
{
    if (!fs::exists(_config.data_dir))
        return;
    auto found = std::vector<std::pair<std::uint64_t, fs::path>> {};
    for (auto const& item: fs::directory_iterator(_config.data_dir))
    {
        auto const name = item.path().filename().string();
        if (!item.is_directory() || name.size() < 2 || name[0] != 's' || !fs::exists(item.path() / "transcript.json"))
            continue;
        try
        {
            found.emplace_back(std::stoull(name.substr(1)), item.path());
        }
        catch (const std::exception&)
        {
        }
    }
    std::sort(found.begin(), found.end());

    for (auto const& [number, dir]: found)
    {
        auto entry = std::make_shared<Entry>();
        entry->id = dir.filename().string();
        entry->dir = dir;
        auto const transcript = transcript_from_json(json::parse(read_text(dir / "transcript.json")));
        auto meta = json::object();
        if (fs::exists(dir / "meta.json"))
            meta = json::parse(read_text(dir / "meta.json"));
        entry->backend_spec = meta.value("backend", _config.default_backend);

        auto library = _config.library;
        library.mode = transcript.mode;
        entry->session = std::make_unique<Session>(Session::restore(transcript, assemble_context(library)));
        entry->backend = backend_for(entry->backend_spec);
        if (auto* scripted = dynamic_cast<ScriptedBackend*>(entry->backend.get()))
            scripted->skip(message_turns(transcript));
        publish(*entry);

        _sessions.emplace(entry->id, entry);
        _order.push_back(entry->id);
        _next_id = std::max(_next_id, number + 1);
    }
}

std::string SessionService::create_session(const CreateOptions& options)
{
    auto library = _config.library;
    library.mode = options.mode;
    if (options.mode != LibraryMode::none && library.entries.empty())
    {
        if (options.mode == LibraryMode::images_and_methods)
            throw Error(ErrorCode::MissingMethod, "library mode needs methods but the library is empty");
        throw Error(ErrorCode::BadConfig, "library mode needs images but the library is empty");
    }
    auto context = assemble_context(library);

    auto header = SessionTranscript {};
    header.created_at = timestamp_utc();
    header.seed = options.seed ? *options.seed : std::random_device {}();
    header.params = _config.params;
    header.mode = options.mode;

    auto entry = std::make_shared<Entry>();
    entry->backend_spec = options.backend.value_or(_config.default_backend);
    entry->backend = backend_for(entry->backend_spec);

    {
        auto lock = std::unique_lock(_mutex);
        entry->id = fmt::format("s{}", _next_id++);
    }
    header.id = entry->id;
    entry->dir = _config.data_dir / entry->id;
    entry->session = std::make_unique<Session>(std::move(header), std::move(context));

    fs::create_directories(entry->dir / "images");
    write_atomic(entry->dir / "meta.json", json { { "backend", entry->backend_spec } }.dump(1));
    persist(*entry, 0);
    publish(*entry);

    auto lock = std::unique_lock(_mutex);
    _sessions.emplace(entry->id, entry);
    _order.push_back(entry->id);
    return entry->id;
}

std::vector<std::string> SessionService::list_sessions() const
{
    auto lock = std::shared_lock(_mutex);
    return _order;
}

json SessionService::get_session(const std::string& id) const
{
    auto entry = find(id);
    auto lock = std::lock_guard(entry->view_mutex);
    auto const& t = *entry->transcript;
    return {
        { "id", t.id },
        { "created_at", t.created_at },
        { "seed", t.seed },
        { "library_mode", to_string(t.mode) },
        { "backend", entry->backend_spec },
        { "revision", entry->canvas->revision },
        { "turns", t.turns.size() },
        { "turn", entry->turn_active ? "agent" : entry->human_turn_requested ? "human" : "idle" },
        { "pending_image", entry->pending_image ? json(entry->pending_image->name) : json(nullptr) },
        { "canvas", to_json(*entry->canvas) },
    };
}

CanvasState SessionService::canvas(const std::string& id) const
{
    auto entry = find(id);
    auto lock = std::lock_guard(entry->view_mutex);
    return *entry->canvas;
}

SessionTranscript SessionService::transcript(const std::string& id) const
{
    auto entry = find(id);
    auto lock = std::lock_guard(entry->view_mutex);
    return *entry->transcript;
}

StrokesResult SessionService::post_strokes(const std::string& id,
                                           std::vector<Polyline> strokes,
                                           const std::optional<std::string>& idempotency_key)
{
    auto entry = find(id);
    // Checked before and after locking: a running turn holds `mutation`.
    if (entry->turn_active)
        throw Error(ErrorCode::TurnInProgress, "the agent is drawing");
    auto lock = std::lock_guard(entry->mutation);
    if (entry->turn_active)
        throw Error(ErrorCode::TurnInProgress, "the agent is drawing");
    if (idempotency_key)
        if (auto it = entry->idempotency.find(*idempotency_key); it != entry->idempotency.end())
        {
            auto seen = it->second;
            seen.replayed = true;
            return seen;
        }
    if (strokes.empty())
        throw Error(ErrorCode::EmptyStrokes, "no strokes to add");

    auto const before = entry->session->canvas().revision;
    auto const& record = entry->session->add_human_strokes(std::move(strokes));
    auto const result = StrokesResult { record.revision_after, record.strokes_element, false };
    persist(*entry, before + 1);
    publish(*entry);
    if (idempotency_key)
        entry->idempotency.emplace(*idempotency_key, result);

    auto const& element = *entry->session->canvas().find(result.element_id);
    emit(*entry,
         { { "type", "strokes_added" },
           { "revision", result.revision },
           { "element_id", result.element_id },
           { "strokes", strokes_json(element.strokes) } });
    return result;
}

TurnRecord SessionService::post_message(const std::string& id, const std::string& text, bool attach_image)
{
    auto entry = find(id);
    if (entry->turn_active.exchange(true))
        throw Error(ErrorCode::TurnInProgress, "a turn is already running");
    auto lock = std::unique_lock(entry->mutation, std::defer_lock);
    try
    {
        lock.lock();
    }
    catch (...)
    {
        entry->turn_active = false;
        throw;
    }

    auto& session = *entry->session;
    auto const turn_index = session.transcript().turns.size();
    auto const before = session.canvas().revision;

    auto input = HumanInput {};
    if (!text.empty())
        input.text = text;
    {
        auto view = std::lock_guard(entry->view_mutex);
        if (attach_image && entry->pending_image)
            input.image = entry->pending_image;
    }

    emit(*entry, { { "type", "turn_started" }, { "turn", turn_index }, { "text", text }, { "revision", before } });

    auto observer = TurnObserver {};
    observer.on_agent_text = [&](const std::string& agent_text) {
        emit(*entry, { { "type", "agent_text" }, { "turn", turn_index }, { "text", agent_text } });
    };
    observer.on_tool_call = [&](const ToolCall& call, const ExecutedCall* executed, const CallFailure* failure) {
        auto event = json {
            { "type", "tool_call" }, { "turn", turn_index }, { "id", call.id }, { "name", call.name }, { "args", call.args },
        };
        if (call.seed)
            event["seed"] = *call.seed;
        if (executed)
        {
            event["status"] = "ok";
            event["element_id"] = executed->element_id;
            event["polylines"] = strokes_json(executed->polylines);
        }
        else if (failure)
        {
            event["status"] = "error";
            event["error"] = { { "code", to_string(failure->code) }, { "message", failure->message }, { "detail", failure->detail } };
        }
        emit(*entry, std::move(event));
    };

    auto record = TurnRecord {};
    try
    {
        record = session.run_turn(input, *entry->backend, observer);
        persist(*entry, before + 1);
    }
    catch (const std::exception& e)
    {
        auto const code = [&] {
            if (auto const* err = dynamic_cast<const Error*>(&e))
                return err->code();
            return ErrorCode::BackendError;
        }();
        emit(*entry, { { "type", "error" }, { "turn", turn_index }, { "code", to_string(code) }, { "message", e.what() } });
        entry->turn_active = false;
        emit(*entry,
             { { "type", "turn_ended" }, { "turn", turn_index }, { "failed", true }, { "revision", session.canvas().revision } });
        throw;
    }

    publish(*entry);
    {
        auto view = std::lock_guard(entry->view_mutex);
        if (input.image)
            entry->pending_image.reset();
        entry->human_turn_requested = false;
    }
    entry->turn_active = false;
    emit(*entry,
         { { "type", "turn_ended" },
           { "turn", turn_index },
           { "failed", false },
           { "failures", record.failures.size() },
           { "revision", record.revision_after } });
    return record;
}

json SessionService::signal(const std::string& id, const Signal& signal)
{
    auto entry = find(id);
    // Checked before and after locking: a running turn holds `mutation`.
    if (entry->turn_active)
        throw Error(ErrorCode::TurnInProgress, "the agent is drawing");
    auto lock = std::lock_guard(entry->mutation);
    if (entry->turn_active)
        throw Error(ErrorCode::TurnInProgress, "the agent is drawing");

    auto event = json { { "type", "signal" }, { "kind", to_string(signal.kind) } };
    if (signal.kind == SignalKind::request_turn)
    {
        auto view = std::lock_guard(entry->view_mutex);
        entry->human_turn_requested = true;
    }
    else
    {
        auto const& canvas = entry->session->canvas();
        auto const w = static_cast<int>(canvas.constraints.width);
        auto const h = static_cast<int>(canvas.constraints.height);
        auto image = GrayImage {};
        if (signal.photo)
        {
            if (!signal.corners)
                throw Error(ErrorCode::InvalidArgument, "a photo needs its four page corners");
            image = rectify_page(*signal.photo, *signal.corners, w, h);
        }
        else
        {
            image = rasterize(canvas);
        }
        auto const count = static_cast<std::size_t>(std::distance(fs::directory_iterator(entry->dir / "images"), fs::directory_iterator {}));
        auto ref = ImageRef { fmt::format("look-{:03}.png", count + 1), "image/png", encode_png(image) };
        write_atomic(entry->dir / "images" / ref.name,
                     std::string_view(reinterpret_cast<const char*>(ref.data.data()), ref.data.size()));
        event["image"] = ref.name;
        event["rectified"] = signal.photo.has_value();
        auto view = std::lock_guard(entry->view_mutex);
        entry->pending_image = std::move(ref);
    }
    emit(*entry, event);
    return event;
}

std::string SessionService::svg(const std::string& id, std::optional<std::uint64_t> revision) const
{
    auto entry = find(id);
    auto canvas = std::shared_ptr<const CanvasState> {};
    {
        auto lock = std::lock_guard(entry->view_mutex);
        canvas = entry->canvas;
    }
    auto const r = revision.value_or(canvas->revision);
    if (r > canvas->revision)
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("revision {} does not exist (current is {})", r, canvas->revision));
    auto const path = snapshot_path(entry->dir, r);
    if (fs::exists(path))
        return read_text(path);
    if (r == canvas->revision)
        return export_svg(*canvas);
    throw Error(ErrorCode::Io, fmt::format("snapshot {} is missing", path.string()));
}

std::string SessionService::pen_program(const std::string& id) const
{
    return export_pen_program(canvas(id));
}

std::uint64_t SessionService::subscribe(const std::string& id,
                                       EventSink sink,
                                       std::optional<std::uint64_t> replay_after)
{
    auto entry = find(id);
    auto lock = std::lock_guard(entry->events_mutex);
    if (replay_after)
        for (auto const& e: entry->log)
            if (e["seq"].get<std::uint64_t>() > *replay_after)
                sink(e);
    auto const token = entry->next_token++;
    entry->sinks.emplace(token, std::move(sink));
    return token;
}

void SessionService::unsubscribe(const std::string& id, std::uint64_t token)
{
    auto entry = find(id);
    auto lock = std::lock_guard(entry->events_mutex);
    entry->sinks.erase(token);
}

std::vector<json> SessionService::events_since(const std::string& id, std::uint64_t after) const
{
    auto entry = find(id);
    auto lock = std::lock_guard(entry->events_mutex);
    auto out = std::vector<json> {};
    for (auto const& e: entry->log)
        if (e["seq"].get<std::uint64_t>() > after)
            out.push_back(e);
    return out;
}

} // namespace companion
