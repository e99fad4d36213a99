// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/backend.hpp>
#include <companion/context.hpp>
#include <companion/perception.hpp>
#include <companion/session.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace companion
{

using BackendFactory = std::function<std::unique_ptr<Backend>(const std::string& spec)>;

struct ServiceConfig
{
    std::filesystem::path data_dir = "companion-data";
    /// Backend used when a session does not name one: "scripted:FILE" or "live".
    std::string default_backend = "live";
    InstructionParams params;
    /// Vocabulary offered to sessions created with a library mode.
    ContextLibrary library;
    /// Defaults to make_backend().
    BackendFactory backend_factory;

    /// COMPANION_DATA_DIR, COMPANION_BACKEND, COMPANION_LIBRARY (manifest path).
    static ServiceConfig from_env();
};

struct CreateOptions
{
    LibraryMode mode = LibraryMode::none;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
};

enum class SignalKind
{
    request_turn,
    look_at_drawing,
};

std::string_view to_string(SignalKind kind);
SignalKind signal_kind_from_string(std::string_view text);

struct Signal
{
    SignalKind kind = SignalKind::request_turn;
    /// look_at_drawing: photographed page and its corners (TL, TR, BR, BL).
    /// Without a photo the simulated canvas is captured.
    std::optional<GrayImage> photo;
    std::optional<std::array<Point, 4>> corners;
};

struct StrokesResult
{
    std::uint64_t revision = 0;
    std::string element_id;
    bool replayed = false; ///< idempotency key seen before; nothing changed
};

/// Event as broadcast to subscribers: {"type", "session", "seq", ...}.
using EventSink = std::function<void(const nlohmann::json& event)>;

/// Owns every session, its persistence directory and its event stream.
///
/// Per session: mutations are serialised, at most one agent turn runs at a
/// time (others fail with TurnInProgress) and reads never wait for a turn.
/// Events of one turn are delivered contiguously:
///   turn_started, (agent_text | tool_call)*, [error], turn_ended.
class SessionService
{
  public:
    explicit SessionService(ServiceConfig config);
    ~SessionService();
    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    /// Errors: BadConfig, MissingMethod.
    std::string create_session(const CreateOptions& options = {});
    /// Ids in creation order.
    [[nodiscard]] std::vector<std::string> list_sessions() const;
    [[nodiscard]] nlohmann::json get_session(const std::string& id) const;
    [[nodiscard]] CanvasState canvas(const std::string& id) const;
    [[nodiscard]] SessionTranscript transcript(const std::string& id) const;

    /// Errors: UnknownSession, EmptyStrokes, TurnInProgress.
    StrokesResult post_strokes(const std::string& id,
                               std::vector<Polyline> strokes,
                               const std::optional<std::string>& idempotency_key = std::nullopt);

    /// Runs one agent turn. When `attach_image` is set and a look_at_drawing
    /// capture is pending, that image is sent; otherwise the simulated
    /// canvas is. Errors: UnknownSession, TurnInProgress, BackendError,
    /// Timeout (the two last after error/turn_ended events).
    TurnRecord post_message(const std::string& id, const std::string& text, bool attach_image = true);

    nlohmann::json signal(const std::string& id, const Signal& signal);

    /// Stored snapshot bytes; the current revision when `revision` is unset.
    /// Errors: UnknownSession, InvalidArgument (no such revision).
    [[nodiscard]] std::string svg(const std::string& id, std::optional<std::uint64_t> revision = std::nullopt) const;
    [[nodiscard]] std::string pen_program(const std::string& id) const;

    /// Returns a token for unsubscribe(). With `replay_after`, buffered events
    /// newer than that seq are delivered first, without gaps or duplicates.
    std::uint64_t subscribe(const std::string& id,
                            EventSink sink,
                            std::optional<std::uint64_t> replay_after = std::nullopt);
    void unsubscribe(const std::string& id, std::uint64_t token);
    /// Buffered events with seq > `after` (most recent 1024 are kept).
    [[nodiscard]] std::vector<nlohmann::json> events_since(const std::string& id, std::uint64_t after) const;

    [[nodiscard]] const ServiceConfig& config() const noexcept { return _config; }

  private:
    struct Entry;

    std::shared_ptr<Entry> find(const std::string& id) const;
    void load_existing();
    std::unique_ptr<Backend> backend_for(const std::string& spec) const;
    void persist(Entry& entry, std::uint64_t from_revision);
    void emit(Entry& entry, nlohmann::json event);
    void publish(Entry& entry);

    ServiceConfig _config;
    mutable std::shared_mutex _mutex;
    std::unordered_map<std::string, std::shared_ptr<Entry>> _sessions;
    std::vector<std::string> _order;
    std::uint64_t _next_id = 1;
};

} // namespace companion
