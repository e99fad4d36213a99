// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/messages.hpp>

#include <openssl/evp.h>

namespace companion
{

std::string_view to_string(Role role)
{
    switch (role)
    {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::model: return "model";
        case Role::tool: return "tool";
    }
    return "user";
}

std::string Message::text() const
{
    auto out = std::string {};
    for (auto const& part: parts)
    {
        if (part.kind != Part::Kind::text)
            continue;
        if (!out.empty())
            out += '\n';
        out += part.text;
    }
    return out;
}

std::size_t Message::image_count() const
{
    auto count = std::size_t { 0 };
    for (auto const& part: parts)
        count += part.kind == Part::Kind::image ? 1 : 0;
    return count;
}

nlohmann::json to_json(const ToolCall& call)
{
    auto doc = nlohmann::json { { "name", call.name }, { "args", call.args } };
    if (!call.id.empty())
        doc["id"] = call.id;
    if (call.seed)
        doc["seed"] = *call.seed;
    return doc;
}

ToolCall tool_call_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string())
        throw Error(ErrorCode::InvalidDocument, "tool call needs a string 'name'");
    auto call = ToolCall {};
    call.name = doc["name"].get<std::string>();
    call.id = doc.value("id", std::string {});
    call.args = doc.value("args", nlohmann::json::object());
    if (doc.contains("seed") && !doc["seed"].is_null())
        call.seed = doc["seed"].get<std::uint64_t>();
    return call;
}

nlohmann::json to_json(const AgentReply& reply)
{
    auto calls = nlohmann::json::array();
    for (auto const& c: reply.tool_calls)
        calls.push_back(to_json(c));
    return { { "text", reply.text }, { "tool_calls", std::move(calls) } };
}

AgentReply reply_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw Error(ErrorCode::InvalidDocument, "reply must be an object");
    auto reply = AgentReply {};
    reply.text = doc.value("text", std::string {});
    if (doc.contains("tool_calls"))
        for (auto const& c: doc["tool_calls"])
            reply.tool_calls.push_back(tool_call_from_json(c));
    return reply;
}

std::string base64_encode(const std::vector<std::uint8_t>& data)
{
    if (data.empty())
        return {};
    auto out = std::string(4 * ((data.size() + 2) / 3), '\0');
    auto const written = EVP_EncodeBlock(
        reinterpret_cast<unsigned char*>(out.data()), data.data(), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(written));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text)
{
    if (text.empty())
        return {};
    if (text.size() % 4 != 0)
        throw Error(ErrorCode::InvalidDocument, "base64 length is not a multiple of 4");
    auto out = std::vector<std::uint8_t>(3 * text.size() / 4);
    auto const written = EVP_DecodeBlock(
        out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (written < 0)
        throw Error(ErrorCode::InvalidDocument, "invalid base64");
    auto size = static_cast<std::size_t>(written);
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding
    for (auto it = text.rbegin(); it != text.rend() && *it == '='; ++it)
        --size;
    out.resize(size);
    return out;
}

} // namespace companion
