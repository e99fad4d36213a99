// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <companion/backend.hpp>

#include <fmt/format.h>

#include <cstdlib>

namespace companion
{

namespace
{

using json = nlohmann::json;

std::string env_or(const char* name, std::string fallback)
{
    auto const* value = std::getenv(name);
    return value && *value ? std::string(value) : std::move(fallback);
}

struct Endpoint
{
    std::string origin; // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url)
{
    auto const scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorCode::BadConfig, fmt::format("endpoint '{}' has no scheme", url));
    auto const path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return { url, "/" };
    return { url.substr(0, path_start), url.substr(path_start) };
}

json content_of(const Message& message)
{
    if (message.image_count() == 0)
        return message.text();
    auto content = json::array();
    for (auto const& part: message.parts)
    {
        if (part.kind == Part::Kind::text)
            content.push_back({ { "type", "text" }, { "text", part.text } });
        else
            content.push_back(
                { { "type", "image_url" },
                  { "image_url",
                    { { "url", fmt::format("data:{};base64,{}", part.image.media_type, base64_encode(part.image.data)) } } } });
    }
    return content;
}

} // namespace

LiveBackendConfig LiveBackendConfig::from_env()
{
    auto config = LiveBackendConfig {};
    config.endpoint = env_or("COMPANION_LLM_ENDPOINT", config.endpoint);
    config.model = env_or("COMPANION_LLM_MODEL", config.model);
    config.api_key = env_or("COMPANION_LLM_API_KEY", "");
    if (auto const t = env_or("COMPANION_LLM_TEMPERATURE", ""); !t.empty())
    {
        try
        {
            config.temperature = std::stod(t);
        }
        catch (const std::exception&)
        {
            throw Error(ErrorCode::BadConfig, fmt::format("COMPANION_LLM_TEMPERATURE='{}' is not a number", t));
        }
    }
    return config;
}

LiveBackend::LiveBackend(LiveBackendConfig config): _config(std::move(config))
{
    split_endpoint(_config.endpoint);
}

json LiveBackend::build_request(std::span<const Message> history, const json& tools) const
{
    auto messages = json::array();
    for (auto const& m: history)
    {
        switch (m.role)
        {
            case Role::system: messages.push_back({ { "role", "system" }, { "content", m.text() } }); break;
            case Role::user: messages.push_back({ { "role", "user" }, { "content", content_of(m) } }); break;
            case Role::model:
            {
                auto item = json { { "role", "assistant" }, { "content", m.text() } };
                if (!m.tool_calls.empty())
                {
                    auto calls = json::array();
                    for (auto const& c: m.tool_calls)
                        calls.push_back({ { "id", c.id },
                                          { "type", "function" },
                                          { "function", { { "name", c.name }, { "arguments", c.args.dump() } } } });
                    item["tool_calls"] = std::move(calls);
                }
                messages.push_back(std::move(item));
                break;
            }
            case Role::tool:
                messages.push_back({ { "role", "tool" }, { "tool_call_id", m.tool_call_id }, { "content", m.text() } });
                break;
        }
    }

    auto body = json { { "model", _config.model }, { "messages", std::move(messages) } };
    if (tools.contains("function_declarations") && !tools["function_declarations"].empty())
    {
        auto list = json::array();
        for (auto const& d: tools["function_declarations"])
            list.push_back({ { "type", "function" }, { "function", d } });
        body["tools"] = std::move(list);
    }
    if (_config.temperature)
        body["temperature"] = *_config.temperature;
    return body;
}

AgentReply LiveBackend::parse_response(const json& body)
{
    if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw Error(ErrorCode::BackendError, "response has no choices");
    auto const& message = body["choices"][0].value("message", json::object());
    auto reply = AgentReply {};
    if (message.contains("content") && message["content"].is_string())
        reply.text = message["content"].get<std::string>();
    if (message.contains("tool_calls") && message["tool_calls"].is_array())
    {
        for (auto const& c: message["tool_calls"])
        {
            auto call = ToolCall {};
            call.id = c.value("id", std::string {});
            auto const& fn = c.value("function", json::object());
            call.name = fn.value("name", std::string {});
            auto const& args = fn.contains("arguments") ? fn["arguments"] : json::object();
            try
            {
                call.args = args.is_string() ? json::parse(args.get<std::string>()) : args;
            }
            catch (const json::exception&)
            {
                // Kept as-is so the dispatcher reports ArgSchemaMismatch back to the model.
                call.args = args;
            }
            reply.tool_calls.push_back(std::move(call));
        }
    }
    if (reply.empty())
        throw Error(ErrorCode::BackendError, "backend returned an empty reply");
    return reply;
}

AgentReply LiveBackend::generate(std::span<const Message> history, const json& tools)
{
    auto const endpoint = split_endpoint(_config.endpoint);
    auto client = httplib::Client(endpoint.origin);
    auto const secs = static_cast<time_t>(_config.timeout.count());
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    if (!_config.api_key.empty())
        client.set_bearer_token_auth(_config.api_key);

    auto const payload = build_request(history, tools).dump();
    auto last_error = httplib::Error::Success;
    for (int attempt = 0; attempt <= std::max(0, _config.retries); ++attempt)
    {
        auto res = client.Post(endpoint.path, payload, "application/json");
        if (!res)
        {
            last_error = res.error();
            continue;
        }
        if (res->status != 200)
            throw Error(ErrorCode::BackendError,
                        fmt::format("backend answered HTTP {}", res->status),
                        { { "status", res->status }, { "body", res->body.substr(0, 2000) } });
        try
        {
            return parse_response(json::parse(res->body));
        }
        catch (const json::exception& e)
        {
            throw Error(ErrorCode::BackendError, fmt::format("malformed backend response: {}", e.what()));
        }
    }
    auto const message = fmt::format("transport error: {}", httplib::to_string(last_error));
    // httplib reports an expired read timeout as a read error
    if (last_error == httplib::Error::Read || last_error == httplib::Error::ConnectionTimeout)
        throw Error(ErrorCode::Timeout, message);
    throw Error(ErrorCode::BackendError, message);
}

} // namespace companion
