// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace companion
{

/// Encoded raster attached to a chat message.
struct ImageRef
{
    std::string name;
    std::string media_type = "image/png";
    std::vector<std::uint8_t> data;

    [[nodiscard]] bool empty() const noexcept { return data.empty(); }
    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct Part
{
    enum class Kind
    {
        text,
        image,
    };

    Kind kind = Kind::text;
    std::string text;
    ImageRef image;

    static Part of_text(std::string text) { return { Kind::text, std::move(text), {} }; }
    static Part of_image(ImageRef image) { return { Kind::image, {}, std::move(image) }; }

    friend bool operator==(const Part&, const Part&) = default;
};

struct ToolCall
{
    std::string id;
    std::string name;
    nlohmann::json args = nlohmann::json::object();
    std::optional<std::uint64_t> seed;

    friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

/// What the model answers in one generate call: conversational text, tool
/// calls, or both.
struct AgentReply
{
    std::string text;
    std::vector<ToolCall> tool_calls;

    [[nodiscard]] bool empty() const noexcept { return text.empty() && tool_calls.empty(); }
    friend bool operator==(const AgentReply&, const AgentReply&) = default;
};

enum class Role
{
    system,
    user,
    model,
    tool,
};

std::string_view to_string(Role role);

struct Message
{
    Role role = Role::user;
    std::vector<Part> parts;
    std::vector<ToolCall> tool_calls; ///< model messages only
    std::string tool_call_id;         ///< tool messages only

    /// Concatenated text parts.
    [[nodiscard]] std::string text() const;
    [[nodiscard]] std::size_t image_count() const;

    friend bool operator==(const Message&, const Message&) = default;
};

nlohmann::json to_json(const ToolCall& call);
ToolCall tool_call_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AgentReply& reply);
AgentReply reply_from_json(const nlohmann::json& doc);

std::string base64_encode(const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

} // namespace companion
