// SPDX-License-Identifier: Apache-2.0
#include <companion/backend.hpp>

#include <fmt/format.h>

#include <fstream>

namespace companion
{

namespace
{

ErrorCode failure_code(std::string_view text)
{
    if (text == "Timeout")
        return ErrorCode::Timeout;
    return ErrorCode::BackendError;
}

} // namespace

ScriptedBackend::ScriptedBackend(std::vector<Step> steps): _steps(std::move(steps))
{
}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& doc)
{
    auto const& items = doc.is_object() && doc.contains("replies") ? doc["replies"] : doc;
    if (!items.is_array())
        throw Error(ErrorCode::InvalidDocument, "scripted backend expects an array of replies");
    auto steps = std::vector<Step> {};
    for (auto const& item: items)
    {
        if (item.is_object() && item.contains("error"))
        {
            auto const& err = item["error"];
            steps.emplace_back(Failure { failure_code(err.value("code", std::string { "BackendError" })),
                                         err.value("message", std::string { "scripted failure" }) });
            continue;
        }
        auto reply = reply_from_json(item);
        if (reply.empty())
            throw Error(ErrorCode::InvalidDocument, "scripted reply has neither text nor tool calls");
        steps.emplace_back(std::move(reply));
    }
    return ScriptedBackend(std::move(steps));
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path)
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    try
    {
        return from_json(nlohmann::json::parse(in));
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::InvalidDocument, fmt::format("{}: {}", path.string(), e.what()));
    }
}

AgentReply ScriptedBackend::generate(std::span<const Message> history, const nlohmann::json& /*tools*/)
{
    _history_sizes.push_back(history.size());
    if (_next >= _steps.size())
        throw Error(ErrorCode::BackendError, "scripted backend has no replies left");
    auto const& step = _steps[_next++];
    if (auto const* failure = std::get_if<Failure>(&step))
        throw Error(failure->code, failure->message);
    return std::get<AgentReply>(step);
}

std::size_t ScriptedBackend::position() const
{
    return _next;
}

void ScriptedBackend::skip(std::size_t count)
{
    _next = std::min(_steps.size(), _next + count);
}

std::vector<std::size_t> ScriptedBackend::history_sizes() const
{
    return _history_sizes;
}

std::unique_ptr<Backend> make_backend(std::string_view spec, const LiveBackendConfig& live)
{
    constexpr auto prefix = std::string_view { "scripted:" };
    if (spec.substr(0, prefix.size()) == prefix)
        return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(std::string(spec.substr(prefix.size()))));
    if (spec == "live")
    {
        if (live.api_key.empty())
            throw Error(ErrorCode::BadConfig, "live backend needs COMPANION_LLM_API_KEY");
        return std::make_unique<LiveBackend>(live);
    }
    throw Error(ErrorCode::BadConfig, fmt::format("unknown backend '{}' (use scripted:FILE or live)", spec));
}

} // namespace companion
