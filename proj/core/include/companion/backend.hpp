// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/error.hpp>
#include <companion/messages.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace companion
{

/// The model behind the agent. Implementations report failures as
/// Error{BackendError | Timeout}; they never return an empty reply.
class Backend
{
  public:
    virtual ~Backend() = default;
    virtual AgentReply generate(std::span<const Message> history, const nlohmann::json& tools) = 0;
};

/// Replays a stored list of replies, one per generate call. A step may also
/// be a failure, which is raised instead of a reply.
class ScriptedBackend final: public Backend
{
  public:
    struct Failure
    {
        ErrorCode code = ErrorCode::BackendError;
        std::string message;
    };
    using Step = std::variant<AgentReply, Failure>;

    explicit ScriptedBackend(std::vector<Step> steps);

    /// Accepts {"replies": [...]} or a bare array. Each item is an AgentReply
    /// ({"text", "tool_calls": [{"name", "args"}]}) or {"error": {"code", "message"}}.
    static ScriptedBackend from_json(const nlohmann::json& doc);
    static ScriptedBackend from_file(const std::filesystem::path& path);

    AgentReply generate(std::span<const Message> history, const nlohmann::json& tools) override;

    [[nodiscard]] std::size_t position() const;
    [[nodiscard]] std::size_t size() const { return _steps.size(); }
    /// Advances past `count` steps (resuming a persisted session).
    void skip(std::size_t count);
    /// Number of generate calls observed, with the history size seen by each.
    [[nodiscard]] std::vector<std::size_t> history_sizes() const;

  private:
    std::vector<Step> _steps;
    std::size_t _next = 0;
    std::vector<std::size_t> _history_sizes;
};

/// OpenAI/Gemini-style chat-completions endpoint with tool calling.
struct LiveBackendConfig
{
    std::string endpoint = "https://generativelanguage.googleapis.com/v1beta/openai/chat/completions";
    std::string model = "gemini-2.5-pro";
    std::string api_key;
    std::chrono::seconds timeout { 120 };
    std::optional<double> temperature;
    int retries = 1;

    /// COMPANION_LLM_ENDPOINT, COMPANION_LLM_MODEL, COMPANION_LLM_API_KEY,
    /// COMPANION_LLM_TEMPERATURE.
    static LiveBackendConfig from_env();
};

class LiveBackend final: public Backend
{
  public:
    explicit LiveBackend(LiveBackendConfig config);

    AgentReply generate(std::span<const Message> history, const nlohmann::json& tools) override;

    /// Request body for `history`; exposed for tests of the wire format.
    [[nodiscard]] nlohmann::json build_request(std::span<const Message> history, const nlohmann::json& tools) const;
    /// Parses a chat-completions response body.
    static AgentReply parse_response(const nlohmann::json& body);

  private:
    LiveBackendConfig _config;
};

/// "scripted:FILE" or "live".
std::unique_ptr<Backend> make_backend(std::string_view spec, const LiveBackendConfig& live = LiveBackendConfig::from_env());

} // namespace companion
