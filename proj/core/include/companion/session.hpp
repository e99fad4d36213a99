// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/backend.hpp>
#include <companion/canvas.hpp>
#include <companion/context.hpp>
#include <companion/instructions.hpp>
#include <companion/messages.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace companion
{

/// What the human contributes to a turn.
struct HumanInput
{
    std::optional<std::string> text;
    /// Rectified photograph; when absent the simulated canvas is rasterised.
    std::optional<ImageRef> image;
    std::vector<Polyline> strokes;
};

struct ExecutedCall
{
    std::size_t call_index = 0;
    std::string element_id;
    std::vector<Polyline> polylines;

    friend bool operator==(const ExecutedCall&, const ExecutedCall&) = default;
};

struct CallFailure
{
    std::size_t call_index = 0;
    std::string name;
    ErrorCode code = ErrorCode::BackendError;
    std::string message;
    nlohmann::json detail;

    friend bool operator==(const CallFailure&, const CallFailure&) = default;
};

enum class TurnKind
{
    human_strokes, ///< strokes posted outside a conversation turn
    message,       ///< human message answered by the agent
};

struct TurnRecord
{
    std::size_t index = 0;
    TurnKind kind = TurnKind::message;
    std::string text;
    std::string image_ref;
    std::vector<Polyline> strokes;
    std::string strokes_element;
    AgentReply reply; ///< tool calls carry their seeds
    std::vector<ExecutedCall> executed;
    std::vector<CallFailure> failures;
    std::uint64_t revision_before = 0;
    std::uint64_t revision_after = 0;

    friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

struct SessionTranscript
{
    std::string id;
    std::string created_at;
    std::uint64_t seed = 0;
    InstructionParams params;
    LibraryMode mode = LibraryMode::none;
    std::vector<TurnRecord> turns;
};

nlohmann::json to_json(const TurnRecord& record);
TurnRecord turn_record_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SessionTranscript& transcript);
SessionTranscript transcript_from_json(const nlohmann::json& doc);

/// Streaming hooks fired while a turn executes, after the backend answered.
struct TurnObserver
{
    std::function<void(const std::string& text)> on_agent_text;
    std::function<void(const ToolCall& call, const ExecutedCall* executed, const CallFailure* failure)> on_tool_call;
};

/// One conversation with the agent: history (instructions + context +
/// turns), the simulated canvas and the transcript that reproduces it.
/// A single writer drives it; turns run strictly one after another.
class Session
{
  public:
    Session(SessionTranscript header, std::vector<Message> context);

    [[nodiscard]] const CanvasState& canvas() const noexcept { return _canvas; }
    [[nodiscard]] const SessionTranscript& transcript() const noexcept { return _transcript; }
    [[nodiscard]] const std::vector<Message>& history() const noexcept { return _history; }
    [[nodiscard]] const std::string& instructions() const noexcept { return _instructions; }

    /// Records human strokes as one constraint-exempt element.
    const TurnRecord& add_human_strokes(std::vector<Polyline> strokes);

    /// See run_turn().
    const TurnRecord& run_turn(const HumanInput& input, Backend& backend, const TurnObserver& observer = {});

    /// Rebuilds a session (history included) by re-executing a transcript.
    static Session restore(const SessionTranscript& transcript, std::vector<Message> context);

  private:
    void apply_human_strokes(CanvasState& canvas, TurnRecord& record, std::vector<Polyline> strokes) const;

    SessionTranscript _transcript;
    std::string _instructions;
    std::vector<Message> _history;
    CanvasState _canvas;
};

/// One exchange: appends the human message (photo, else a raster of the
/// canvas), asks the backend, then executes every returned tool call in
/// order. Failed calls are recorded and reported back to the model as tool
/// results; remaining calls still run. A backend failure aborts the turn
/// with the session untouched.
const TurnRecord& run_turn(Session& session, const HumanInput& input, Backend& backend, const TurnObserver& observer = {});

/// Re-executes a transcript with its recorded seeds. `on_revision` sees the
/// canvas at every revision, starting with the empty one.
CanvasState replay(const SessionTranscript& transcript,
                   const std::function<void(const CanvasState&)>& on_revision = {});

/// ISO-8601 UTC time for transcript headers; honours SOURCE_DATE_EPOCH so
/// reproducible builds of artefacts get fixed timestamps.
std::string timestamp_utc();

/// Text of the tool-result message sent back for a call.
std::string tool_result_text(const ExecutedCall* executed, const CallFailure* failure);

} // namespace companion
